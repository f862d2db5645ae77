"""High-precision evaluation of Siegel functions and discriminant quotients.

A Siegel function g_{(r1,r2)} is defined for rational (r1, r2) not both
integral by the Fourier product

    g = -q^(B2(r1)/2) * e^(pi i r2 (r1-1)) * (1 - q_z)
        * prod_{n>=1} (1 - q^n q_z)(1 - q^n / q_z)

with q = e^(2 pi i tau), q_z = e^(2 pi i (r1 tau + r2)) and B2 the second
Bernoulli polynomial X^2 - X + 1/6.  Fractional powers of q always mean
e^(2 pi i tau x), so every phase is carried exactly; nothing here is
normalized to a positive real.

Also provided: the quotient N^12 Delta(N tau)/Delta(tau) as a pure eta-style
q-product (the (2 pi i)^12 factors cancel), the classical congruence test
for a product of Siegel functions to be modular of level N, and the
conductor bound for the invariant construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from . import _kernels
from .bignum import context, mpq_ceil, mpq_floor, to_complex
from .errors import ConditionViolated, PrecisionExhausted

MIN_IM = mpq(1, 10)  # hard floor; CM points in scope sit far above it
GUARD_BITS = 64
MAX_TERMS = 5_000_000


def as_mpq(x) -> mpq:
    return x if isinstance(x, mpq) else mpq(x)


@dataclass(frozen=True)
class SiegelIndex:
    """Rational index pair (r1, r2), not both integral.

    Indices are stored exactly as given (phases depend on the chosen
    representative); ``canonical`` reduces to fractional parts in [0,1)^2
    and ``orbit_key`` is a canonical label for the r ~ -r symmetry class
    that the 12N/gcd(6,N)-th powers cannot distinguish.
    """

    r1: mpq
    r2: mpq

    def __post_init__(self):
        object.__setattr__(self, "r1", as_mpq(self.r1))
        object.__setattr__(self, "r2", as_mpq(self.r2))
        if self.r1.denominator == 1 and self.r2.denominator == 1:
            raise ValueError(f"index {(self.r1, self.r2)} is integral (level 1 rejected)")

    @property
    def level(self) -> int:
        return math.lcm(int(self.r1.denominator), int(self.r2.denominator))

    def canonical(self) -> "SiegelIndex":
        return SiegelIndex(self.r1 - mpq_floor(self.r1), self.r2 - mpq_floor(self.r2))

    def negated(self) -> "SiegelIndex":
        return SiegelIndex(-self.r1, -self.r2)

    def orbit_key(self) -> tuple[mpq, mpq]:
        a = self.canonical()
        b = self.negated().canonical()
        return min((a.r1, a.r2), (b.r1, b.r2))


@dataclass(frozen=True)
class IndexFamily:
    """Finitely supported integer exponents on Siegel indices, at level n."""

    items: tuple[tuple[SiegelIndex, int], ...]
    level: int

    @classmethod
    def of(cls, exponents: Mapping[SiegelIndex, int] | Iterable[tuple[SiegelIndex, int]],
           level: int) -> "IndexFamily":
        pairs = exponents.items() if isinstance(exponents, Mapping) else exponents
        items = tuple(sorted(((r, int(e)) for r, e in pairs),
                             key=lambda it: (it[0].r1, it[0].r2)))
        fam = cls(items=items, level=level)
        for r, _ in items:
            if level % r.level:
                raise ValueError(f"index {r} has level {r.level}, not dividing {level}")
        return fam

    @property
    def exponents(self) -> dict[SiegelIndex, int]:
        return dict(self.items)


@dataclass(frozen=True)
class EvalContext:
    """Evaluation point and truncation/precision budget, immutable.

    truncation_terms satisfies |q_tau|^truncation_terms < 2^(-precision-32).
    """

    tau: mpc
    q_tau: mpc
    truncation_terms: int
    precision: int

    @classmethod
    def create(cls, tau, precision: int) -> "EvalContext":
        tau = to_complex(tau, precision)
        im = tau.imag
        if im < MIN_IM:  # mpfr-mpq comparison is exact
            raise PrecisionExhausted(
                f"Im(tau) = {im} below the evaluation floor {float(MIN_IM)}"
            )
        with context(precision + GUARD_BITS):
            two_pi_im = 2 * gmpy2.const_pi() * im
            terms = int(gmpy2.floor((precision + 32) * gmpy2.log(2) / two_pi_im)) + 1
            q_tau = gmpy2.exp(mpc(0, 2) * gmpy2.const_pi() * tau)
        if terms > MAX_TERMS:
            raise PrecisionExhausted(
                f"{terms} q-product terms needed at Im(tau)={im}, over the budget"
            )
        return cls(tau=tau, q_tau=to_complex(q_tau, precision),
                   truncation_terms=terms, precision=precision)


def siegel_value(r: SiegelIndex, ctx: EvalContext) -> mpc:
    """g_{(r1,r2)}(tau) at ctx precision; relative error <= 2^(-precision+16)."""
    wp = ctx.precision + GUARD_BITS
    r1, r2 = r.r1, r.r2
    with context(wp):
        pi = gmpy2.const_pi()
        tau = mpc(ctx.tau)
        q = gmpy2.exp(mpc(0, 2) * pi * tau)
        qz = gmpy2.exp(mpc(0, 2) * pi * (mpfr(r1) * tau + mpfr(r2)))
        b2_half = (r1 * r1 - r1 + mpq(1, 6)) / 2
        prefactor = -gmpy2.exp(mpc(0, 2) * pi * tau * mpfr(b2_half)) * gmpy2.exp(
            mpc(0, 1) * pi * mpfr(r2) * mpfr(r1 - 1)
        )
        head = 1 - qz
    # extra terms cover the |q^n / q_z| shift when r1 is far from [0,1)
    shift = mpq_ceil(abs(r1)) + 2
    terms = ctx.truncation_terms + shift
    if terms > MAX_TERMS:
        raise PrecisionExhausted(f"{terms} q-product terms needed, over the budget")
    core = _kernels.qprod(q, qz, terms, wp)
    with context(wp):
        value = prefactor * head * core
    if value == 0 or not (gmpy2.is_finite(value.real) and gmpy2.is_finite(value.imag)):
        raise PrecisionExhausted(f"Siegel product degenerated at index {r}")
    return to_complex(value, ctx.precision)


def siegel_power(r: SiegelIndex, e: int, ctx: EvalContext) -> mpc:
    """g_{(r1,r2)}(tau)^e."""
    if e == 0:
        raise ValueError("exponent must be nonzero")
    wp = ctx.precision + GUARD_BITS
    ctx_wp = EvalContext.create(ctx.tau, wp)
    with context(wp):
        value = siegel_value(r, ctx_wp) ** e
    return to_complex(value, ctx.precision)


def delta_quotient(n: int, ctx: EvalContext) -> mpc:
    """N^12 Delta(N tau)/Delta(tau) = N^12 q^(N-1) prod((1-q^(Nn))/(1-q^n))^24."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return to_complex(1, ctx.precision)
    wp = ctx.precision + GUARD_BITS
    with context(wp):
        pi = gmpy2.const_pi()
        tau = mpc(ctx.tau)
        q = gmpy2.exp(mpc(0, 2) * pi * tau)
        qn = q**n
    terms = ctx.truncation_terms + 2
    num = _kernels.one_minus_qn_prod(qn, terms // n + 2, wp)
    den = _kernels.one_minus_qn_prod(q, terms, wp)
    with context(wp):
        value = mpfr(n) ** 12 * q ** (n - 1) * (num / den) ** 24
    if value == 0:
        raise PrecisionExhausted("Delta quotient underflowed to zero")
    return to_complex(value, ctx.precision)


@dataclass(frozen=True)
class ModularityReport:
    """Outcome of the level-N congruence test, with one entry per congruence."""

    ok: bool
    congruences: tuple[tuple[str, bool, int, int], ...]  # (name, passed, lhs, modulus)

    def __bool__(self) -> bool:
        return self.ok

    @property
    def failures(self) -> list[str]:
        return [name for name, passed, _, _ in self.congruences if not passed]


def modularity_check(fam: IndexFamily) -> ModularityReport:
    """Congruence conditions for prod g_r^(m(r)) to be modular of level N."""
    n = fam.level
    if n < 2:
        raise ValueError("level must be >= 2")
    s11 = s22 = s12 = total = 0
    for r, m in fam.items:
        a1 = int(n * r.r1)
        a2 = int(n * r.r2)
        s11 += m * a1 * a1
        s22 += m * a2 * a2
        s12 += m * a1 * a2
        total += m
    mod_sq = math.gcd(2, n) * n
    rows = (
        ("sum m (N r1)^2", s11 % mod_sq == 0, s11, mod_sq),
        ("sum m (N r2)^2", s22 % mod_sq == 0, s22, mod_sq),
        ("sum m (N r1)(N r2)", s12 % n == 0, s12, n),
        ("gcd(12,N) sum m", (math.gcd(12, n) * total) % 12 == 0, math.gcd(12, n) * total, 12),
    )
    return ModularityReport(ok=all(p for _, p, _, _ in rows), congruences=rows)


def bound_max_conductor(d_k: int, prec: int = 192) -> int:
    """Largest admissible conductor for the invariant construction.

    Computes floor(-sqrt(3) pi / ln(1 - 2.16 e^(-pi sqrt(-d_k)/24))); only
    defined for d_k <= -43, else ConditionViolated.  floor (not round)
    because the expression is an upper bound.
    """
    if d_k > -43:
        raise ConditionViolated(
            f"d_K = {d_k} > -43: outside the admissible region for the bound"
        )
    # the bound grows like e^(pi sqrt(-d)/24) and computing log(1 - tiny)
    # cancels as many bits again; keep the integer part exactly resolvable
    # whatever precision the caller asked for
    scale_bits = int(math.pi * math.sqrt(-d_k) / 24 / math.log(2)) + 1
    prec = max(prec, 128, 2 * scale_bits + 96)
    with context(prec):
        pi = gmpy2.const_pi()
        x = 1 - mpfr("2.16") * gmpy2.exp(-pi * gmpy2.sqrt(mpfr(-d_k)) / 24)
        value = -gmpy2.sqrt(mpfr(3)) * pi / gmpy2.log(x)
        out = int(gmpy2.floor(value))
    if out < 2:
        raise AssertionError(f"bound {out} < 2 for d_K = {d_k}; formula misapplied")
    return out


def condition_holds(d_k: int, n: int) -> bool:
    """True iff (d_k, n) lies in the proven conductor region for the invariant construction."""
    if d_k > -43 or n < 2:
        return False
    return n <= bound_max_conductor(d_k)
