"""
Twisted torus knots K(p, q, r, m, n) on a genus-two Heegaard surface

Builds the words the knot represents in the two handlebodies, its surface slope, and the
twist-knot words used as a calibration family.
"""

import logging
import math
from dataclasses import dataclass

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .exceptions import InvalidParametersError
from .freegroup import GEN_X, GEN_Y, Substitution, Word, reduce, substitute

logger = logging.getLogger(__name__)


class TtkParams(BaseModel):
    """Parameters (p, q, r, m, n) of a twisted torus knot"""

    model_config = ConfigDict(frozen=True)

    p: int = Field(ge=0)
    q: int = Field(ge=0)
    r: int = Field(ge=0)
    m: int = Field(default=1, ge=0)
    n: int = 1

    @model_validator(mode="after")
    def _check_constraints(self) -> "TtkParams":
        if self.r > self.p + self.q:
            raise ValueError(f"r must satisfy 0 <= r <= p+q = {self.p + self.q}, got {self.r}")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"p and q must be coprime, got ({self.p}, {self.q})")
        if math.gcd(self.m, abs(self.n)) != 1:
            raise ValueError(f"m and n must be coprime, got ({self.m}, {self.n})")
        return self

    @property
    def eps(self) -> int | None:
        """Sign of n when |n| = 1, otherwise None"""
        return self.n if abs(self.n) == 1 else None

    @property
    def r_bar(self) -> int:
        return self.r % self.p if self.p else self.r

    def as_tuple(self) -> tuple[int, int, int, int, int]:
        return (self.p, self.q, self.r, self.m, self.n)

    def __str__(self) -> str:
        return "K({},{},{},{},{})".format(*self.as_tuple())


def parse_params(text: str) -> TtkParams:
    """Parse the comma-separated form ``"p,q,r,m,n"``"""
    parts = [part.strip() for part in text.split(",")]
    if len(parts) != 5:
        raise InvalidParametersError(
            f"Expected five comma-separated integers p,q,r,m,n, got {text!r}"
        )
    try:
        p, q, r, m, n = (int(part) for part in parts)
    except ValueError:
        raise InvalidParametersError(f"Parameters must be integers, got {text!r}") from None
    return TtkParams(p=p, q=q, r=r, m=m, n=n)


class PatternWord(BaseModel):
    """A word over {A, B}; A marks a jump whose source lies in the twisting window"""

    model_config = ConfigDict(frozen=True)

    symbols: str

    @field_validator("symbols")
    @classmethod
    def _only_a_and_b(cls, value: str) -> str:
        if set(value) - {"A", "B"}:
            raise ValueError(f"Pattern words use only A and B, got {value!r}")
        return value

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return self.symbols

    def count_a(self) -> int:
        return self.symbols.count("A")

    def to_word(self, image_of_a: Word = GEN_X, image_of_b: Word = GEN_Y) -> Word:
        """Substitute words for A and B"""
        template = reduce(1 if symbol == "A" else 2 for symbol in self.symbols)
        return substitute(template, Substitution(image_of_a, image_of_b))


def _check_pattern_args(p: int, q: int, r_bar: int) -> None:
    if p < 1:
        raise InvalidParametersError(f"Pattern words need p >= 1, got {p}")
    if math.gcd(p, q) != 1:
        raise InvalidParametersError(f"p and q must be coprime, got ({p}, {q})")
    if not 0 <= r_bar < p:
        raise InvalidParametersError(f"r_bar must lie in [0, {p}), got {r_bar}")


def jump_pattern(p: int, q: int, r_bar: int) -> PatternWord:
    """
    Circle-jumping construction of the pattern word.

    Mark points 1..p on a circle and jump from point 1 onwards, q points at a time. The
    i-th symbol is A iff the i-th jump starts at one of the points 1..r_bar.
    """
    _check_pattern_args(p, q, r_bar)
    symbols = []
    source = 1
    for _ in range(p):
        symbols.append("A" if source <= r_bar else "B")
        source = (source - 1 + q) % p + 1
    return PatternWord(symbols="".join(symbols))


def interval_pattern(p: int, q: int, r_bar: int) -> PatternWord:
    """
    Interval construction of the pattern word.

    Divide [0, pq) into q blocks of length p and mark the first r_bar units of each block;
    the j-th symbol is A iff the point j*q falls in a marked part.
    """
    _check_pattern_args(p, q, r_bar)
    windows = [(i * p, i * p + r_bar) for i in range(max(q, 1))]
    symbols = []
    for j in range(p):
        point = j * q
        symbols.append("A" if any(low <= point < high for low, high in windows) else "B")
    return PatternWord(symbols="".join(symbols))


def transformed_word(p: int, q: int, r_bar: int) -> Word:
    """Pattern word read in the transformed basis, A -> x and B -> y"""
    return jump_pattern(p, q, r_bar).to_word()


def ttk_word(p: int, q: int, r: int, m: int) -> Word:
    """
    Word of K(p, q, r, m, n) in the inside handlebody; it does not depend on n.

    With r = r_bar + alpha*p, each A of the pattern word becomes x^((alpha+1)m) y and each B
    becomes x^(alpha*m) y.
    """
    if p < 1:
        raise InvalidParametersError(f"Word generation needs p >= 1, got {p}")
    params = TtkParams(p=p, q=q, r=r, m=m, n=1)
    alpha, r_bar = divmod(params.r, p)
    blocks = Substitution(
        GEN_X ** ((alpha + 1) * m) * GEN_Y,
        GEN_X ** (alpha * m) * GEN_Y,
    )
    return substitute(transformed_word(p, q, r_bar), blocks)


def ttk_word_outside(params: TtkParams) -> Word:
    """
    Word of the knot in the outside handlebody.

    The roles of (p, m) and (q, n) swap; only |n| affects the letters, the sign of n is
    carried by ``params.eps``.
    """
    if params.q < 1:
        raise InvalidParametersError(f"The outside word needs q >= 1, got {params.q}")
    return ttk_word(params.q, params.p, params.r, abs(params.n))


def surface_slope(params: TtkParams) -> int:
    return params.p * params.q + params.m * params.n * params.r**2


@dataclass(frozen=True)
class TwistKnotWord:
    word: Word
    slope: int


def twist_knot_word(n: int, l: int) -> TwistKnotWord:
    """x^(2n+1) y x^-n y^l x^-n y, with surface slope 2 + l"""
    x, y = GEN_X, GEN_Y
    word = x ** (2 * n + 1) * y * x**-n * y**l * x**-n * y
    return TwistKnotWord(word=word, slope=2 + l)
