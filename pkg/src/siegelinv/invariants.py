"""Class-field invariants and their exact integer minimal polynomials.

Assembles the singular product invariant over coprime residues, evaluates
its full Galois conjugate set, expands prod (X - x_i) by exact complex
convolution, and rounds coefficients to integers with doubling-and-retry
on ambiguous rounding.  Also: the unit test on the constant term, the
discriminant-quotient invariant for prime-power conductors, the canonical
ray-class value at the unit class, and the normal-basis magnitude
certificate.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .bignum import context, round_to_integer, to_complex
from .errors import (
    AmbiguousRounding,
    ConditionViolated,
    PrecisionExhausted,
    RatioViolation,
    RoundingFailed,
    SplitPrime,
)
from .galois import (
    UNBOUNDED,
    ConjugateSpec,
    Unbounded,
    conjugate_specs,
    ratio_power_exponent,
)
from .modfunc import (
    EvalContext,
    IndexFamily,
    SiegelIndex,
    condition_holds,
    delta_quotient,
    siegel_value,
)
from .quadforms import ImQuadField, kronecker

GUARD_BITS = 64
COEFF_TOLERANCE = mpq(1, 10**8)


@dataclass(frozen=True)
class IntPolynomial:
    """Monic integer polynomial reconstructed from numeric roots.

    Coefficients run from the constant term upward; max_residual is the
    largest rounding residual met while reconstructing and must clear the
    acceptance threshold 10^-8.
    """

    coefficients: tuple[int, ...]
    max_residual: mpfr
    precision_used: int

    def __post_init__(self):
        if not self.coefficients or self.coefficients[-1] != 1:
            raise ValueError("polynomial must be monic")
        if not self.max_residual < COEFF_TOLERANCE:  # mpfr-mpq comparison is exact
            raise ValueError(f"max rounding residual {self.max_residual} over threshold")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def constant_term(self) -> int:
        return self.coefficients[0]

    def __call__(self, x: mpc) -> mpc:
        out = mpc(0)
        for c in reversed(self.coefficients):
            out = out * x + c
        return out

    def is_squarefree(self) -> bool:
        """gcd with the derivative over Q is constant (no repeated roots)."""
        a = [mpq(c) for c in self.coefficients]
        b = [mpq(i * c) for i, c in enumerate(self.coefficients)][1:]
        while any(b):
            while b and b[-1] == 0:
                b.pop()
            if len(b) == 0:
                break
            if len(a) < len(b):
                a, b = b, a
                continue
            shift = len(a) - len(b)
            factor = a[-1] / b[-1]
            for i, bc in enumerate(b):
                a[i + shift] -= factor * bc
            while a and a[-1] == 0:
                a.pop()
            a, b = b, a
        return len(a) == 1


@dataclass(frozen=True)
class InvariantReport:
    """One invariant with its conjugates, exact polynomial, and certificates."""

    value: mpc
    conjugates: tuple[mpc, ...]
    labels: tuple[tuple[tuple[int, int, int, int], tuple[int, int, int]], ...]
    polynomial: IntPolynomial
    is_unit: bool
    normal_basis_exponent: int | Unbounded
    ratios: tuple[mpfr, ...] | None = None

    def __post_init__(self):
        if self.polynomial.degree != len(self.conjugates):
            raise ValueError("polynomial degree != conjugate count")


def default_family(field: ImQuadField, n: int, power: int = 1) -> IndexFamily:
    """The invariant's index family: exponent 12N/gcd(6,N) (times ``power``)
    at (0, w/N) for 1 <= w <= N/2 coprime to N."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if power == 0:
        raise ValueError("power must be nonzero")
    e = 12 * n // math.gcd(6, n) * power
    return IndexFamily.of(
        {SiegelIndex(mpq(0), mpq(w, n)): e
         for w in range(1, n // 2 + 1) if math.gcd(w, n) == 1},
        n,
    )


def family_value(family: IndexFamily, tau, prec: int) -> mpc:
    """prod over the family of g_r(tau)^e at ``prec`` bits."""
    wp = prec + GUARD_BITS
    ctx = EvalContext.create(to_complex(tau, wp), wp)
    with context(wp):
        out = mpc(1)
        for r, e in family.items:
            out *= siegel_value(r, ctx) ** e
    return to_complex(out, prec)


def _gate_condition(field: ImQuadField, n: int, force: bool) -> None:
    if force:
        return
    if not condition_holds(field.d_k, n):
        raise ConditionViolated(
            f"(d_K, N) = ({field.d_k}, {n}) violates the conductor condition; "
            "pass force=True to compute anyway"
        )


def ring_class_invariant(field: ImQuadField, n: int, prec: int,
                         force: bool = False, power: int = 1) -> mpc:
    """The singular product invariant at the order generator; real and nonzero."""
    _gate_condition(field, n, force)
    value = family_value(default_family(field, n, power), field.theta(prec + GUARD_BITS), prec)
    if value == 0:
        raise PrecisionExhausted("invariant underflowed to zero")
    return value


def _evaluate_specs(specs: list[ConjugateSpec], prec: int,
                    threads: int | None = None) -> list[mpc]:
    def one(spec: ConjugateSpec) -> mpc:
        return family_value(spec.family, spec.point.value(prec + GUARD_BITS), prec)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, specs))
    return [one(s) for s in specs]


def _expand_and_round(values: list[mpc], prec: int) -> tuple[list[int], mpfr]:
    with context(prec):
        coeffs = [mpc(1)]
        for v in values:
            coeffs = [mpc(0)] + coeffs
            for i in range(len(coeffs) - 1):
                coeffs[i] -= v * coeffs[i + 1]
        scale = max(abs(c) for c in coeffs)
        im_tol = mpfr(2) ** (-(prec // 2)) * max(mpfr(1), scale)
    out = []
    max_resid = mpfr(0)
    for c in coeffs:
        if abs(c.imag) > im_tol:
            raise AmbiguousRounding(
                f"coefficient imaginary part {c.imag} too large", residual=abs(c.imag)
            )
        n, resid = round_to_integer(c.real, COEFF_TOLERANCE)
        out.append(n)
        max_resid = max(max_resid, resid)
    return out, max_resid


def minimal_polynomial(field: ImQuadField, n: int, base: IndexFamily | None = None,
                       prec: int = 512, force: bool = False,
                       threads: int | None = None) -> InvariantReport:
    """Exact minimal-polynomial candidate of the invariant over K.

    Evaluates every conjugate, expands prod (X - x_i), rounds every
    coefficient; retries with doubled precision up to three times before
    giving up with RoundingFailed.  Degree always equals the ring-class
    degree over K; irreducibility is not certified (square-freeness is).
    """
    if base is None:
        base = default_family(field, n)
        _gate_condition(field, n, force)
    specs = conjugate_specs(field, n, base)
    attempt_prec = prec
    last_error: AmbiguousRounding | None = None
    for _ in range(4):
        values = _evaluate_specs(specs, attempt_prec, threads)
        try:
            coeffs, max_resid = _expand_and_round(values, attempt_prec)
        except AmbiguousRounding as exc:
            last_error = exc
            attempt_prec *= 2
            continue
        poly = IntPolynomial(tuple(coeffs), max_resid, attempt_prec)
        value = values[0]
        with context(attempt_prec):
            if not abs(value.imag) <= mpfr(2) ** (-(attempt_prec // 2)) * abs(value):
                raise AssertionError("identity conjugate is not real to working precision")
        mags = [abs(v) for v in values]
        return InvariantReport(
            value=value,
            conjugates=tuple(values),
            labels=tuple((s.gamma.entries, (s.form.a, s.form.b, s.form.c)) for s in specs),
            polynomial=poly,
            is_unit=unit_check(poly),
            normal_basis_exponent=ratio_power_exponent(mags),
        )
    raise RoundingFailed(
        f"coefficient rounding failed up to {attempt_prec // 2} bits: {last_error}"
    )


def unit_check(p: IntPolynomial) -> bool:
    """Algebraic-unit test: monic integer polynomial with constant term +-1."""
    return p.constant_term in (1, -1)


def delta_ring_class_invariant(field: ImQuadField, p: int, ell: int, prec: int) -> mpc:
    """p^12 Delta(p^ell theta)/Delta(p^(ell-1) theta) for p inert or ramified.

    Computed as the quotient of two discriminant-quotient values; the p^12
    normalizations telescope exactly.
    """
    if not gmpy2.is_prime(p):
        raise ValueError(f"{p} is not prime")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if kronecker(field.d_k, p) == 1:
        raise SplitPrime(f"{p} splits in Q(sqrt({field.d_k}))")
    wp = prec + GUARD_BITS
    ctx = EvalContext.create(field.theta(wp), wp)
    with context(wp):
        value = delta_quotient(p**ell, ctx) / delta_quotient(p ** (ell - 1), ctx)
    return to_complex(value, prec)


def delta_consistency(field: ImQuadField, p: int, ell: int, prec: int) -> mpfr:
    """Relative residual of the cross-check identity

        prod_{1<=w<p^ell, gcd(w,p)=1} g_{(0,w/p^ell)}^(12 p^ell)(theta)
            = (p^12 Delta(p^ell theta)/Delta(p^(ell-1) theta))^(p^ell),

    evaluated through two independent code paths (Siegel products on the
    left, eta-style products on the right).  The identity is a telescoping
    statement that holds for every prime; the inert/ramified gate applies
    only to the invariant construction itself."""
    if not gmpy2.is_prime(p):
        raise ValueError(f"{p} is not prime")
    pl = p**ell
    wp = prec + GUARD_BITS
    fam = IndexFamily.of(
        {SiegelIndex(mpq(0), mpq(w, pl)): 12 * pl
         for w in range(1, pl) if math.gcd(w, p) == 1},
        pl,
    )
    lhs = family_value(fam, field.theta(wp), prec)
    ctx = EvalContext.create(field.theta(wp), wp)
    with context(wp):
        quotient = delta_quotient(pl, ctx) / delta_quotient(p ** (ell - 1), ctx)
        rhs = quotient**pl
        return mpfr(abs(lhs - rhs) / abs(rhs))


def siegel_ramachandra_unit_class(field: ImQuadField, n: int, prec: int) -> mpc:
    """Canonical 12N-th Siegel power g_{(0,1/N)}^(12N)(theta) at the unit class."""
    if n < 2:
        raise ValueError("n must be >= 2")
    fam = IndexFamily.of({SiegelIndex(mpq(0), mpq(1, n)): 12 * n}, n)
    return family_value(fam, field.theta(prec + GUARD_BITS), prec)


def normal_basis_certificate(field: ImQuadField, n: int, prec: int,
                             threads: int | None = None) -> InvariantReport:
    """Magnitude certificate that conjugates of a high power of the inverse
    invariant form a normal basis.

    The identity conjugate of the inverse invariant must strictly dominate:
    every nontrivial ratio < 1 (RatioViolation otherwise — that would
    contradict the supporting inequalities, so it flags a bug or precision
    failure), and the smallest admissible power exponent is reported.  The
    attached polynomial is the direct invariant's (always integral).
    """
    _gate_condition(field, n, force=False)
    base = default_family(field, n)
    specs = conjugate_specs(field, n, base)
    values = _evaluate_specs(specs, prec, threads)
    with context(prec):
        inverse_values = [1 / v for v in values]
        mags = [abs(v) for v in inverse_values]
        ratios = tuple(m / mags[0] for m in mags[1:])
    bad = [float(r) for r in ratios if not r < 1]
    if bad:
        raise RatioViolation(f"conjugate ratios >= 1: {bad}")
    exponent = ratio_power_exponent(mags)
    if exponent is UNBOUNDED:
        raise RatioViolation("ratio exponent unbounded despite ratios < 1")
    coeffs, max_resid = _expand_and_round(values, prec)
    poly = IntPolynomial(tuple(coeffs), max_resid, prec)
    return InvariantReport(
        value=inverse_values[0],
        conjugates=tuple(inverse_values),
        labels=tuple((s.gamma.entries, (s.form.a, s.form.b, s.form.c)) for s in specs),
        polynomial=poly,
        is_unit=unit_check(poly),
        normal_basis_exponent=exponent,
        ratios=ratios,
    )
