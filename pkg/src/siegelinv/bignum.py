"""Arbitrary-precision arithmetic kernel with explicit precision contracts.

Values are immutable gmpy2 objects (MPFR reals, MPC complexes, GMP
rationals); arithmetic on two values at precision p is correctly rounded,
so the relative error is at most 2^(1-p) per operation.  Precision is
always an explicit argument: each operation installs a thread-local gmpy2
context for its own duration and never touches global state, which makes
everything here safe to call from any number of threads.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import AmbiguousRounding, ExponentRangeError

BigReal = mpfr
BigComplex = mpc
Rational = mpq

MIN_PRECISION = 64
DEFAULT_PRECISION = 512
MAX_PRECISION = 1 << 20


def context(prec: int):
    """Thread-local gmpy2 context at ``prec`` bits, for use as a ``with`` target."""
    if prec < MIN_PRECISION:
        raise ValueError(f"precision must be >= {MIN_PRECISION} bits, got {prec}")
    if prec > MAX_PRECISION:
        raise ValueError(f"precision must be <= {MAX_PRECISION} bits, got {prec}")
    return gmpy2.context(precision=prec)


def precision_of(x) -> int:
    """Working precision carried by a BigReal/BigComplex value."""
    p = x.precision
    if isinstance(p, tuple):
        return max(p)
    return p


def to_real(x, prec: int) -> BigReal:
    with context(prec):
        return mpfr(x)


def to_complex(x, prec: int) -> BigComplex:
    with context(prec):
        return mpc(x)


def const_pi(prec: int) -> BigReal:
    with context(prec):
        return gmpy2.const_pi()


def cexp(z: BigComplex, prec: int | None = None) -> BigComplex:
    """e^z, correctly rounded; relative error <= 4 * 2^(-prec).

    ``prec`` defaults to the precision of ``z``.  Raises
    ExponentRangeError when Re(z) pushes the magnitude outside the MPFR
    exponent range.
    """
    if prec is None:
        prec = max(precision_of(z), MIN_PRECISION)
    with context(prec):
        out = gmpy2.exp(mpc(z))
    if not (gmpy2.is_finite(out.real) and gmpy2.is_finite(out.imag)):
        raise ExponentRangeError(f"exp overflow/underflow for Re(z)={z.real}")
    return out


def root_of_unity(n: int, k: int, prec: int) -> BigComplex:
    """e^(2 pi i k / n); |result| = 1 within 2^(-prec+4)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k %= n
    if k == 0:
        return to_complex(1, prec)
    with context(prec + 16):
        angle = 2 * gmpy2.const_pi() * k / n
        val = gmpy2.exp(mpc(0, 1) * angle)
    return to_complex(val, prec)


def mpq_floor(x: Rational) -> int:
    """Exact floor of a rational (never routed through context-precision floats)."""
    q = mpq(x)
    return int(q.numerator) // int(q.denominator)


def mpq_ceil(x: Rational) -> int:
    q = mpq(x)
    return -((-int(q.numerator)) // int(q.denominator))


def round_to_integer(x, tol) -> tuple[int, BigReal]:
    """Nearest integer to ``x`` and the exact rounding residual |x - n|.

    The conversion to an exact rational is lossless, so ties (residual
    exactly 1/2) are detected exactly and always raise; a residual above
    ``tol`` raises as well, signalling that the caller should retry at
    higher precision.
    """
    prec = max(precision_of(x), MIN_PRECISION) if isinstance(x, mpfr) else MIN_PRECISION
    q = mpq(x)
    t = mpq(tol) if not isinstance(tol, mpq) else tol
    if t <= 0:
        raise ValueError("tolerance must be positive")
    n = mpq_floor(q + mpq(1, 2))
    residual = abs(q - n)
    if residual == mpq(1, 2):
        raise AmbiguousRounding(
            f"exact rounding tie at {x}", residual=to_real(residual, prec), tie=True
        )
    if residual > t:
        raise AmbiguousRounding(
            f"rounding residual {to_real(residual, prec)} exceeds tolerance {t}",
            residual=to_real(residual, prec),
        )
    return n, to_real(residual, prec)


def retry_with_doubling(fn, prec: int, retries: int = 3):
    """Run ``fn(prec)``, doubling the precision on AmbiguousRounding.

    Returns ``fn``'s result; re-raises the final AmbiguousRounding after
    ``retries`` doublings.
    """
    attempt = 0
    while True:
        try:
            return fn(prec)
        except AmbiguousRounding:
            if attempt >= retries:
                raise
            attempt += 1
            prec *= 2
