"""Ray-class-field tower constructions.

For a prime p >= 5 and m coprime to p: the rank-two elementary abelian
Galois group of the level-p^2 m tower over level pm with its two explicit
generators, the congruence solutions picking out each index-p subgroup's
fixed field, the cyclotomic/Siegel exponent maps of the generator action,
the geometric-sum normal-basis elements, and — for the higher tower — the
Hensel-lifted SL2(Z) matrix whose powers contract p-adically, together
with the orbit product it generates and its root-of-unity shift
certificate.

All congruence work is exact integer arithmetic; only the normal-basis
values and the orbit product are numeric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .bignum import context, mpq_floor, root_of_unity, to_complex
from .errors import NoRoot
from .galois import sl2_lift_raw
from .modfunc import EvalContext, SiegelIndex, siegel_value
from .quadforms import ImQuadField, Mat2

FULL = "full"
GUARD_BITS = 64


@dataclass(frozen=True)
class GammaParams:
    """Tower parameters: prime p >= 5, m >= 1 coprime to p, and the field."""

    p: int
    m: int
    field: ImQuadField

    def __post_init__(self):
        if self.p < 5 or not gmpy2.is_prime(self.p):
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.m < 1 or math.gcd(self.p, self.m) != 1:
            raise ValueError(f"m must be >= 1 and coprime to p, got {self.m}")

    @property
    def modulus(self) -> int:
        return self.p * self.p * self.m


@dataclass(frozen=True)
class HenselParams:
    """Higher-tower parameters with n >= 2*ell >= 2."""

    p: int
    m: int
    n: int
    ell: int

    def __post_init__(self):
        if self.p < 5 or not gmpy2.is_prime(self.p):
            raise ValueError(f"p must be a prime >= 5, got {self.p}")
        if self.m < 1 or math.gcd(self.p, self.m) != 1:
            raise ValueError(f"m must be >= 1 and coprime to p, got {self.m}")
        if self.ell < 1 or self.n < 2 * self.ell:
            raise ValueError(f"need n >= 2*ell >= 2, got n={self.n}, ell={self.ell}")

    @property
    def lift_modulus(self) -> int:
        return self.p ** (2 * (self.n - self.ell)) * self.m

    @property
    def max_power_index(self) -> int:
        return 2 * (self.n - self.ell) - self.ell


FixedFieldLabel = tuple[int, int]


def labels(p: int) -> list[FixedFieldLabel]:
    """The p+1 subgroup labels (0,1), (1,0), (1,1), ..., (1,p-1)."""
    return [(0, 1), (1, 0)] + [(1, ell) for ell in range(1, p)]


def gamma_generators(gp: GammaParams) -> tuple[Mat2, Mat2]:
    """The two order-p generators mod p^2 m: the scalar 1 + pm and the
    unipotent-like matrix with lower-left pm."""
    pm = gp.p * gp.m
    mod = gp.modulus
    b, c = gp.field.b_theta, gp.field.c_theta
    alpha = ((1 + pm) % mod, 0, 0, (1 + pm) % mod)
    beta = ((1 - b * pm) % mod, (-c * pm) % mod, pm % mod, 1)
    return alpha, beta


def gamma_element(k: int, ell: int, gp: GammaParams) -> Mat2:
    """alpha^k beta^ell in closed form mod p^2 m."""
    pm = gp.p * gp.m
    mod = gp.modulus
    b, c = gp.field.b_theta, gp.field.c_theta
    return (
        (1 + (k - b * ell) * pm) % mod,
        (-c * ell * pm) % mod,
        (ell * pm) % mod,
        (1 + k * pm) % mod,
    )


def gamma_elements(gp: GammaParams) -> list[Mat2]:
    """All p^2 elements alpha^k beta^ell, 0 <= k, ell < p."""
    out = [gamma_element(k, ell, gp) for k in range(gp.p) for ell in range(gp.p)]
    if len(set(out)) != gp.p * gp.p:
        raise AssertionError("generator enumeration produced repeats")
    return out


def _inv_mod_p(y: int, p: int) -> int:
    """The inverse normalized to (0, p)."""
    y %= p
    if y == 0:
        raise ValueError(f"{y} not invertible mod {p}")
    return pow(y, -1, p)


def fixed_field_solution(label: FixedFieldLabel, gp: GammaParams) -> tuple[int, int]:
    """Nonnegative (x, y) whose element zeta^x g^(12my) is fixed exactly by
    the subgroup of ``label`` (and by no other of the p+1 subgroups)."""
    p, m, b = gp.p, gp.m, gp.field.b_theta
    if label == (0, 1):
        return 1, m * _inv_mod_p(6, p) * (p - b)
    if label == (1, 0):
        return 0, 1
    k, ell = label
    if k != 1 or not 1 <= ell < p:
        raise ValueError(f"invalid label {label} for p={p}")
    return 1, m * _inv_mod_p(6 * ell, p) * (2 + p - b * ell)


def gamma_action_exponents(label: FixedFieldLabel, x: int, y: int, gp: GammaParams) -> int:
    """Exponent of zeta_{p^2} acquired by zeta^x g^(12my) under the labelled
    generator, mod p^2; zero exactly when the fixing congruence holds."""
    k, ell = label
    p, m, b = gp.p, gp.m, gp.field.b_theta
    return ((2 * k - b * ell) * p * m * x - 6 * p * ell * y) % (p * p)


def congruence_satisfied(label: FixedFieldLabel, x: int, y: int, gp: GammaParams) -> bool:
    return gamma_action_exponents(label, x, y, gp) == 0


@dataclass(frozen=True)
class NormalBasisValue:
    """Numeric geometric-sum normal-basis element with the (x, y) it used."""

    label: FixedFieldLabel | Literal["full"]
    x: int
    y_unreduced: int
    y: int  # reduced into [0, p)
    value: mpc


def normal_basis_value(label: FixedFieldLabel | Literal["full"], gp: GammaParams,
                       prec: int) -> NormalBasisValue:
    """sum_{s=0}^{p-1} (zeta_{p^2}^x g_{(0,1/pm)}^(12my)(theta))^s, or for the
    ``full`` label the product of the two plain geometric sums.

    The exponent y is reduced mod p into [0, p); the unreduced table value
    is recorded alongside.
    """
    p, m = gp.p, gp.m
    wp = prec + GUARD_BITS
    theta = gp.field.theta(wp)
    ctx = EvalContext.create(theta, wp)
    g_base = siegel_value(SiegelIndex(mpq(0), mpq(1, p * m)), ctx)
    if label == FULL:
        with context(wp):
            zeta = root_of_unity(p * p, 1, wp)
            zsum = mpc(0)
            gsum = mpc(0)
            g12m = g_base ** (12 * m)
            for s in range(p):
                zsum += zeta**s
                gsum += g12m**s
            value = zsum * gsum
        return NormalBasisValue(label=FULL, x=1, y_unreduced=1, y=1,
                                value=to_complex(value, prec))
    x, y_raw = fixed_field_solution(label, gp)
    y = y_raw % p
    with context(wp):
        base = root_of_unity(p * p, x, wp) * g_base ** (12 * m * y)
        value = mpc(0)
        for s in range(p):
            value += base**s
    return NormalBasisValue(label=label, x=x, y_unreduced=y_raw, y=y,
                            value=to_complex(value, prec))


def hensel_beta0(hp: HenselParams, field: ImQuadField) -> Mat2:
    """SL2(Z) matrix congruent to the order-unit pattern mod p^(2(n-ell)) m,
    with determinant exactly 1.

    The free parameter solves the determinant congruence; the quadratic has
    a nonvanishing derivative mod p, so Hensel lifting (quadratic modulus
    growth) always lands a root — NoRoot firing would be a bug.
    """
    p, m, ell, n = hp.p, hp.m, hp.ell, hp.n
    b, c = field.b_theta, field.c_theta
    pl = p**ell
    a2 = pl * m * m
    a1 = 2 * m - b * pl * m * m
    a0 = c * pl * m * m - b * m

    def f(x: int) -> int:
        return a2 * x * x + a1 * x + a0

    def fp(x: int) -> int:
        return 2 * a2 * x + a1

    target_exp = 2 * (n - ell) - ell
    root = next((x for x in range(p) if f(x) % p == 0), None)
    if root is None:
        raise NoRoot(f"f(x) has no root mod {p}")
    if fp(root) % p == 0:
        raise NoRoot(f"derivative vanishes at the root mod {p}")
    k = 1
    x0 = root
    while k < target_exp:
        k = min(2 * k, target_exp)
        mod = p**k
        x0 = (x0 - f(x0) * pow(fp(x0) % mod, -1, mod)) % mod
    assert f(x0) % p**target_exp == 0
    lift_mod = hp.lift_modulus
    target = (
        (1 + pl * m * x0 - b * pl * m) % lift_mod,
        (-c * pl * m) % lift_mod,
        (pl * m) % lift_mod,
        (1 + pl * m * x0) % lift_mod,
    )
    if (target[0] * target[3] - target[1] * target[2]) % lift_mod != 1:
        raise AssertionError("determinant congruence not satisfied after lifting")
    return sl2_lift_raw(target, lift_mod)


def _matmul(a: Mat2, b: Mat2) -> Mat2:
    return (
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    )


def _matpow(a: Mat2, e: int) -> Mat2:
    out: Mat2 = (1, 0, 0, 1)
    while e:
        if e & 1:
            out = _matmul(out, a)
        a = _matmul(a, a)
        e >>= 1
    return out


def p_valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def verify_contraction(beta0: Mat2, hp: HenselParams) -> list[dict]:
    """Exact-integer certificate rows for beta0^(p^k) == I mod p^(ell+k) m
    with lower-left entry of p-valuation exactly ell+k (unit cofactor)."""
    p, m, ell = hp.p, hp.m, hp.ell
    rows = []
    for k in range(hp.max_power_index + 1):
        power = _matpow(beta0, p**k)
        mod = p ** (ell + k) * m
        congruent = all((power[i] - (1, 0, 0, 1)[i]) % mod == 0 for i in range(4))
        ll = power[2]
        val = p_valuation(ll // m, p) if ll % m == 0 and ll != 0 else None
        unit = (ll // (m * p ** (ell + k))) % p != 0 if val == ell + k else False
        rows.append({
            "k": k,
            "modulus": mod,
            "congruent_to_identity": congruent,
            "lower_left_valuation": val,
            "valuation_exact": val == ell + k,
            "unit_cofactor": unit,
        })
    return rows


@dataclass(frozen=True)
class OrbitProduct:
    """Orbit product value with its index orbit and shift certificate."""

    value: mpc
    index_orbit: tuple[SiegelIndex, ...]
    shifted_value: mpc
    ratio: mpc
    predicted_ratio: mpc
    ratio_power_error: mpfr  # |ratio^(p^(n-ell)) - 1|


def _translation_phase_exponent(r1: mpq, r2: mpq, exponent: int) -> mpq:
    """Exact phase exponent E (in turns) with g_r^e = e^(2 pi i E) g_rc^e for
    rc the fractional-part representative of r = rc + (s1, s2)."""
    s1 = mpq_floor(r1)
    s2 = mpq_floor(r2)
    rc1, rc2 = r1 - s1, r2 - s2
    e = exponent * (mpq(s1 * s2 + s1 + s2, 2) - (mpq(s1) * rc2 - mpq(s2) * rc1) / 2)
    return e - mpq_floor(e)


def g_theta_product(hp: HenselParams, field: ImQuadField, prec: int) -> OrbitProduct:
    """prod_{s=0}^{p^(n-2 ell)-1} g^(12m) at the beta-orbit of (0, 1/(p^(n-ell) m)).

    Indices are reduced to fractional parts with the exact translation
    phase carried as a root of unity, so the value matches the literal
    matrix-acted product.  The beta-shifted product divided by the plain
    one must be a p^(n-ell)-th root of unity; both the measured and the
    predicted ratio (from the lower-left entry of beta^(p^(n-2 ell))) are
    reported.
    """
    p, m, ell, n = hp.p, hp.m, hp.ell, hp.n
    beta0 = hensel_beta0(hp, field)
    den = p ** (n - ell) * m
    orbit_len = p ** (n - 2 * ell)
    exponent = 12 * m
    wp = prec + GUARD_BITS
    theta = field.theta(wp)
    ctx = EvalContext.create(theta, wp)

    def acted(power: Mat2) -> tuple[SiegelIndex, mpq]:
        r1 = mpq(power[2], den)          # (0, 1/den) . M picks out M's bottom row
        r2 = mpq(power[3], den)
        phase = _translation_phase_exponent(r1, r2, exponent)
        return SiegelIndex(r1, r2).canonical(), phase

    def orbit_product(start: int) -> tuple[mpc, list[SiegelIndex]]:
        value = mpc(1)
        indices = []
        current = _matpow(beta0, start)
        with context(wp):
            for _ in range(orbit_len):
                idx, phase = acted(current)
                indices.append(idx)
                value *= cexp_turns(phase, wp) * siegel_value(idx, ctx) ** exponent
                current = _matmul(current, beta0)
        return value, indices

    value, indices = orbit_product(0)
    shifted, _ = orbit_product(1)
    with context(wp):
        ratio = shifted / value
        order = p ** (n - ell)
        err = abs(ratio**order - 1)
        power = _matpow(beta0, orbit_len)
        c_entry = (power[2] // den) % order
        predicted = cexp_turns(mpq(-6 * c_entry, order), wp)
    return OrbitProduct(
        value=to_complex(value, prec),
        index_orbit=tuple(indices),
        shifted_value=to_complex(shifted, prec),
        ratio=to_complex(ratio, prec),
        predicted_ratio=to_complex(predicted, prec),
        ratio_power_error=mpfr(err),
    )


def cexp_turns(e: mpq, prec: int) -> mpc:
    """e^(2 pi i e) for an exact rational number of turns."""
    with context(prec):
        return gmpy2.exp(mpc(0, 2) * gmpy2.const_pi() * mpfr(e))
