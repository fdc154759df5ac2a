"""
Shared fixtures for the twistedtorus test suite.
"""

import pytest

from twistedtorus.config import settings
from twistedtorus.freegroup import Word
from twistedtorus.ttk import TtkParams


@pytest.fixture(autouse=True)
def restore_budget():
    """The CLI writes --budget into the settings singleton; undo it after each test"""
    saved = settings.whitehead_budget
    yield
    settings.whitehead_budget = saved


@pytest.fixture
def w():
    """Parse a word from its external text form"""
    return Word.parse


@pytest.fixture
def k7231() -> TtkParams:
    """K(7,2,3,1,1), the running example: middle-SF inside, primitive outside"""
    return TtkParams(p=7, q=2, r=3, m=1, n=1)


@pytest.fixture
def k7231_negative() -> TtkParams:
    return TtkParams(p=7, q=2, r=3, m=1, n=-1)
