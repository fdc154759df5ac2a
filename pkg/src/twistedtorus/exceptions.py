"""Error hierarchy for twistedtorus.

Validation problems are ``ValueError`` subclasses; exhausting the Whitehead search budget is a
``RuntimeError`` subclass and never degrades into a wrong answer.
"""


class TwistedTorusError(Exception):
    """Base class for all twistedtorus errors"""


class InvalidParametersError(TwistedTorusError, ValueError):
    """Parameters violate an operation's precondition"""


class WordSyntaxError(InvalidParametersError):
    """Text is not a word over x, y, X, Y"""


class NotMiddleSeifertFiberedError(InvalidParametersError):
    """No middle decomposition r_bar = alpha*q_hat or p - alpha*q_hat exists"""


class NotPrimitiveMiddleSfError(InvalidParametersError):
    """Knot is not middle Seifert-fibered inside and primitive outside"""


class TripleNotRealizableError(InvalidParametersError):
    """A multiplicity triple cannot be realized by the requested construction"""


class SearchBudgetExceeded(TwistedTorusError, RuntimeError):
    """Whitehead search visited more nodes than the configured budget"""

    def __init__(self, budget: int, context: str = ""):
        self.budget = budget
        self.context = context
        suffix = f" while {context}" if context else ""
        super().__init__(f"Whitehead search budget of {budget} nodes exceeded{suffix}")


class InconsistentPipelineError(TwistedTorusError):
    """Two computations of the same quantity disagree"""


class VerificationFailure(TwistedTorusError):
    """A property suite found a counterexample"""
