"""Exception taxonomy.

Every failure mode that maps to a CLI exit code has its own class; the
mapping lives in :mod:`siegelinv.cli`.
"""


class SiegelInvError(Exception):
    """Base class for all package errors."""


class NotFundamental(SiegelInvError):
    """Discriminant is not a fundamental discriminant."""


class ExcludedField(SiegelInvError):
    """Discriminant -3 or -4: the extra roots of unity break the formulas."""


class ExponentRangeError(SiegelInvError):
    """A complex exponential left the representable exponent range."""


class AmbiguousRounding(SiegelInvError):
    """Nearest-integer rounding residual exceeded tolerance (or hit an
    exact tie), signalling insufficient working precision."""

    def __init__(self, message, residual=None, tie=False):
        super().__init__(message)
        self.residual = residual
        self.tie = tie


class RoundingFailed(SiegelInvError):
    """Integer reconstruction failed even after precision-doubling retries."""


class PrecisionExhausted(SiegelInvError):
    """Requested precision unreachable within the evaluation term budget."""


class ConditionViolated(SiegelInvError):
    """(d_K, N) lies outside the admissible conductor region."""


class SplitPrime(SiegelInvError):
    """Prime splits in the field; the quotient construction needs inert
    or ramified primes."""


class RatioViolation(SiegelInvError):
    """A conjugate-magnitude ratio expected to be < 1 was not; indicates a
    bug or precision failure, never a legitimate input."""


class NoRoot(SiegelInvError):
    """Quadratic congruence unexpectedly has no root modulo p."""
