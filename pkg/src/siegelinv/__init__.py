"""Ring-class and ray-class field invariants of imaginary quadratic fields
from singular values of Siegel functions, with exact integer minimal
polynomials and numeric normal-basis certificates."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .bignum import BigComplex, BigReal, Rational
from .errors import (
    AmbiguousRounding,
    ConditionViolated,
    ExcludedField,
    ExponentRangeError,
    NoRoot,
    NotFundamental,
    PrecisionExhausted,
    RatioViolation,
    RoundingFailed,
    SiegelInvError,
    SplitPrime,
)
from .galois import UNBOUNDED
from .invariants import (
    IntPolynomial,
    InvariantReport,
    minimal_polynomial,
    normal_basis_certificate,
    ring_class_invariant,
    unit_check,
)
from .modfunc import EvalContext, IndexFamily, SiegelIndex, bound_max_conductor
from .quadforms import ImQuadField, ReducedForm, make_field, reduced_forms

__all__ = [
    "AmbiguousRounding",
    "BACKEND",
    "BigComplex",
    "BigReal",
    "ConditionViolated",
    "EvalContext",
    "ExcludedField",
    "ExponentRangeError",
    "ImQuadField",
    "IndexFamily",
    "IntPolynomial",
    "InvariantReport",
    "KERNEL_BACKEND",
    "NoRoot",
    "NotFundamental",
    "PrecisionExhausted",
    "Rational",
    "RatioViolation",
    "ReducedForm",
    "RoundingFailed",
    "SiegelIndex",
    "SiegelInvError",
    "SplitPrime",
    "UNBOUNDED",
    "bound_max_conductor",
    "make_field",
    "minimal_polynomial",
    "normal_basis_certificate",
    "reduced_forms",
    "ring_class_invariant",
    "unit_check",
]
