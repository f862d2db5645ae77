"""Matrix-group machinery for Shimura reciprocity.

The unit group W of the CM order acting on level-N functions, its scalar
cosets (which enumerate ring-class conjugates), the diagonal*SL2
decomposition of GL2(Z/NZ), exact SL2(Z) lifting, the right action of
matrices on Siegel indices, and the Frobenius-determinant / character-sum
toolkit on finite abelian groups used by the normal-basis criteria.

All matrices live in GL2(Z/NZ) modulo +-1; equality always compares the
canonical sign representative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .bignum import context, precision_of, root_of_unity
from .modfunc import IndexFamily, SiegelIndex, modularity_check
from .quadforms import (
    CMPoint,
    ImQuadField,
    Mat2,
    ReducedForm,
    beta_q,
    cm_point,
    degree_data,
    factorize,
    reduced_forms,
)


class Unbounded:
    """Sentinel for a magnitude-ratio criterion that no power can satisfy."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"


UNBOUNDED = Unbounded()


def _normalize_pm(entries: Mat2, n: int) -> Mat2:
    """Canonical representative of {M, -M} mod n: lexicographically smaller
    tuple, which puts the first nonzero entry in [1, n/2] whenever the two
    differ there."""
    m = tuple(x % n for x in entries)
    neg = tuple((-x) % n for x in entries)
    return min(m, neg)


@dataclass(frozen=True)
class GLMatModN:
    """Element of GL2(Z/NZ)/{+-1}, stored as the canonical sign representative."""

    entries: Mat2
    modulus: int

    def __post_init__(self):
        n = self.modulus
        if n < 2:
            raise ValueError("modulus must be >= 2")
        m = _normalize_pm(self.entries, n)
        if math.gcd((m[0] * m[3] - m[1] * m[2]) % n, n) != 1:
            raise ValueError(f"matrix {m} not invertible mod {n}")
        object.__setattr__(self, "entries", m)

    @classmethod
    def identity(cls, n: int) -> "GLMatModN":
        return cls((1, 0, 0, 1), n)

    def det(self) -> int:
        a, b, c, d = self.entries
        return (a * d - b * c) % self.modulus

    def mul(self, other: "GLMatModN") -> "GLMatModN":
        if self.modulus != other.modulus:
            raise ValueError("modulus mismatch")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        n = self.modulus
        return GLMatModN((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h), n)

    def inv(self) -> "GLMatModN":
        a, b, c, d = self.entries
        n = self.modulus
        di = pow((a * d - b * c) % n, -1, n)
        return GLMatModN((d * di, -b * di, -c * di, a * di), n)

    @property
    def is_scalar(self) -> bool:
        a, b, c, d = self.entries
        return b == 0 and c == 0 and a == d


@dataclass(frozen=True)
class WGroupElement:
    """Element (t, s) of the CM-order unit group W_{N,theta}, modulo +-1.

    Its matrix is (t - B*s, -C*s; s, t) where X^2 + B*X + C is the minimal
    polynomial of the order generator.
    """

    t: int
    s: int
    n: int
    b_theta: int
    c_theta: int

    def __post_init__(self):
        t, s = self.t % self.n, self.s % self.n
        t, s = min((t, s), ((-t) % self.n, (-s) % self.n))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "s", s)

    def det(self) -> int:
        return (self.t**2 - self.b_theta * self.s * self.t + self.c_theta * self.s**2) % self.n

    @property
    def matrix(self) -> GLMatModN:
        t, s = self.t, self.s
        return GLMatModN(
            (t - self.b_theta * s, -self.c_theta * s, s, t), self.n
        )

    @property
    def is_scalar(self) -> bool:
        return self.s == 0


@dataclass(frozen=True)
class ConjugateSpec:
    """Recipe for one Galois conjugate of a singular product value:
    the acted index family and the CM point to evaluate it at, labelled by
    the scalar-coset representative and the form that produced it."""

    family: IndexFamily
    point: CMPoint
    gamma: GLMatModN
    form: ReducedForm


@dataclass(frozen=True)
class AbelianGroupSpec:
    """Finite abelian group as a product of cyclic factors; elements are
    integer tuples under componentwise addition."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if any(k < 1 for k in self.orders):
            raise ValueError("cyclic factor orders must be >= 1")

    @property
    def order(self) -> int:
        return math.prod(self.orders) if self.orders else 1

    @property
    def identity(self) -> tuple[int, ...]:
        return tuple(0 for _ in self.orders)

    def elements(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(k) for k in self.orders)))

    def negate(self, g: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((-x) % k for x, k in zip(g, self.orders))

    def sub(self, g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
        return tuple((x - y) % k for x, y, k in zip(g, h, self.orders))


def w_group(field: ImQuadField, n: int) -> list[WGroupElement]:
    """All invertible (t, s) pairs mod n, modulo +-1; the count equals the
    ray-class degree over the Hilbert class field."""
    if n < 2:
        raise ValueError("n must be >= 2")
    seen = set()
    out = []
    for t in range(n):
        for s in range(n):
            el = WGroupElement(t, s, n, field.b_theta, field.c_theta)
            if (el.t, el.s) in seen:
                continue
            if math.gcd(el.det(), n) != 1:
                continue
            seen.add((el.t, el.s))
            out.append(el)
    out.sort(key=lambda e: (e.s, e.t))
    expected = degree_data(field, n).ray_over_hilbert
    if len(out) != expected:
        raise AssertionError(
            f"W group size {len(out)} != degree formula {expected} for d_K={field.d_k}, N={n}"
        )
    return out


def w_cosets_ring(field: ImQuadField, n: int) -> list[GLMatModN]:
    """One representative per coset of the scalar subgroup in W, i.e. one
    per ring-class conjugate over the Hilbert class field.

    Representative: the member with lexicographically smallest (s, t) after
    sign normalization; cosets are ordered by that key, identity first.
    """
    elements = w_group(field, n)
    units = [u for u in range(1, n) if math.gcd(u, n) == 1]
    seen: set[tuple[int, int]] = set()
    reps = []
    for el in elements:
        if (el.t, el.s) in seen:
            continue
        orbit = []
        for u in units:
            member = WGroupElement(el.t * u, el.s * u, n, field.b_theta, field.c_theta)
            orbit.append(member)
            seen.add((member.t, member.s))
        rep = min(orbit, key=lambda e: (e.s, e.t))
        reps.append(rep)
    reps.sort(key=lambda e: (e.s, e.t))
    expected = degree_data(field, n).ring_over_hilbert
    if len(reps) != expected:
        raise AssertionError(
            f"{len(reps)} scalar cosets != ring degree {expected} for d_K={field.d_k}, N={n}"
        )
    return [r.matrix for r in reps]


def act_on_index(r: SiegelIndex, gamma: GLMatModN) -> SiegelIndex:
    """Right action (r1, r2) -> (r1, r2) * gamma, reduced to fractional parts."""
    if gamma.modulus % r.level:
        raise ValueError(f"index level {r.level} does not divide modulus {gamma.modulus}")
    a, b, c, d = gamma.entries
    return SiegelIndex(r.r1 * a + r.r2 * c, r.r1 * b + r.r2 * d).canonical()


def conjugate_specs(field: ImQuadField, n: int, base: IndexFamily) -> list[ConjugateSpec]:
    """Full conjugate recipe list: one spec per (scalar coset, form) pair.

    The (identity coset, identity form) entry reproduces the base family
    at the order generator.  The count equals the ring-class degree over K.
    """
    report = modularity_check(base)
    if not report:
        raise ValueError(f"base family is not modular of level {base.level}: {report.failures}")
    if base.level != n:
        raise ValueError(f"family level {base.level} != {n}")
    specs = []
    for gamma in w_cosets_ring(field, n):
        for form in reduced_forms(field):
            bq = GLMatModN(beta_q(form, field, n), n)
            mat = gamma.mul(bq)
            family = IndexFamily.of(
                [(act_on_index(r, mat), e) for r, e in base.items], n
            )
            specs.append(
                ConjugateSpec(family=family, point=cm_point(form, field), gamma=gamma, form=form)
            )
    expected = degree_data(field, n).ring_over_k
    if len(specs) != expected:
        raise AssertionError(f"{len(specs)} conjugate specs != ring degree {expected}")
    return specs


def decompose_gl(gamma: GLMatModN) -> tuple[int, GLMatModN]:
    """gamma = (1 0; 0 d) * sl_part with d = det(gamma) and det(sl_part) = 1."""
    n = gamma.modulus
    d = gamma.det()
    di = pow(d, -1, n)
    a, b, c, dd = gamma.entries
    sl_part = GLMatModN((a, b, c * di, dd * di), n)
    return d, sl_part


def sl2_lift_raw(entries: Mat2, n: int) -> Mat2:
    """Integer matrix congruent to ``entries`` mod n with determinant exactly 1.

    Requires det == 1 mod n (no sign normalization is applied: the output
    matches the given representative, which matters when the congruence
    class itself is the contract).  First column is made primitive by
    shifting a by multiples of n, then the second column is corrected by a
    single column operation solved by CRT.
    """
    a, b, c, d = [x % n for x in entries]
    if (a * d - b * c) % n != 1:
        raise ValueError(f"det {(a * d - b * c) % n} != 1 mod {n}")
    c2 = c
    if math.gcd(a, c2) != 1:
        if c2 == 0:
            c2 = n
        a2, k = a, 0
        while math.gcd(a2, c2) != 1:
            k += 1
            a2 = a + k * n
        a = a2
    g, u, v = gmpy2.gcdext(a, c2)
    assert g == 1
    b0, d0 = -int(v), int(u)
    # lifted first column (a, c2); solve a*j + b0 == b, c2*j + d0 == d mod n
    residues = []
    for p, e in factorize(n).items():
        pe = p**e
        if a % p:
            residues.append(((b - b0) * pow(a % pe, -1, pe) % pe, pe))
        else:
            residues.append(((d - d0) * pow(c2 % pe, -1, pe) % pe, pe))
    j, modulus = 0, 1
    for value, m in residues:
        inv = pow(modulus % m, -1, m)
        j += modulus * ((value - j) * inv % m)
        modulus *= m
    out = (a, a * j + b0, c2, c2 * j + d0)
    assert out[0] * out[3] - out[1] * out[2] == 1
    assert all((out[i] - (entries[0], entries[1], entries[2], entries[3])[i]) % n == 0
               for i in range(4))
    return out


def sl2_lift(m: GLMatModN) -> Mat2:
    """SL2(Z) preimage of an element with det == 1 mod N (mod +-1)."""
    if m.det() != 1:
        raise ValueError(f"det {m.det()} != 1 mod {m.modulus}")
    return sl2_lift_raw(m.entries, m.modulus)


def _character_table(group: AbelianGroupSpec, prec: int) -> dict[int, list[mpc]]:
    tables = {}
    for i, k in enumerate(group.orders):
        tables[i] = [root_of_unity(k, j, prec) for j in range(k)]
    return tables


def _char_value(tables, chi, g, orders, prec) -> mpc:
    with context(prec):
        out = mpc(1)
        for i, k in enumerate(orders):
            out *= tables[i][(chi[i] * g[i]) % k]
        return out


def frobenius_lhs(group: AbelianGroupSpec, f: dict[tuple[int, ...], mpc],
                  prec: int | None = None) -> mpc:
    """prod over characters chi of sum_k chi(g_k^-1) f(g_k)."""
    prec = prec or max((precision_of(v) for v in f.values()), default=128)
    elements = group.elements()
    tables = _character_table(group, prec)
    with context(prec):
        out = mpc(1)
        for chi in elements:
            total = mpc(0)
            for g in elements:
                total += _char_value(tables, chi, group.negate(g), group.orders, prec) * f[g]
            out *= total
        return out


def frobenius_rhs(group: AbelianGroupSpec, f: dict[tuple[int, ...], mpc],
                  prec: int | None = None) -> mpc:
    """det of the group matrix (f(g_k * g_l^-1))_{k,l}."""
    prec = prec or max((precision_of(v) for v in f.values()), default=128)
    elements = group.elements()
    nn = len(elements)
    with context(prec):
        rows = [[mpc(f[group.sub(gk, gl)]) for gl in elements] for gk in elements]
        det = mpc(1)
        for i in range(nn):
            pivot = max(range(i, nn), key=lambda r: abs(rows[r][i]))
            if rows[pivot][i] == 0:
                return mpc(0)
            if pivot != i:
                rows[i], rows[pivot] = rows[pivot], rows[i]
                det = -det
            det *= rows[i][i]
            for r in range(i + 1, nn):
                factor = rows[r][i] / rows[i][i]
                for col in range(i, nn):
                    rows[r][col] -= factor * rows[i][col]
        return det


@dataclass(frozen=True)
class CharacterSumReport:
    ok: bool
    margins: tuple[tuple[tuple[int, ...], mpfr], ...]  # (character index, |sum|)

    def __bool__(self):
        return self.ok

    @property
    def min_margin(self) -> mpfr:
        return min(m for _, m in self.margins)


def character_sum_test(group: AbelianGroupSpec, values: dict[tuple[int, ...], mpc],
                       zero_tol, prec: int | None = None) -> CharacterSumReport:
    """Normal-basis criterion: every character sum must clear ``zero_tol``.

    A certified "nonzero with margin" is reported per character; a sum
    below tolerance yields ok=False (never a claim that the sum is zero).
    """
    prec = prec or max((precision_of(v) for v in values.values()), default=128)
    elements = group.elements()
    tables = _character_table(group, prec)
    margins = []
    with context(prec):
        tol = mpfr(zero_tol)
        for chi in elements:
            total = mpc(0)
            for g in elements:
                total += _char_value(tables, chi, group.negate(g), group.orders, prec) * values[g]
            margins.append((chi, abs(total)))
    ok = all(m > tol for _, m in margins)
    return CharacterSumReport(ok=ok, margins=tuple(margins))


def ratio_power_exponent(magnitudes) -> int | Unbounded:
    """Smallest m with (max ratio to the first magnitude)^m <= 1/n.

    The first entry is the reference; n is the list length.  UNBOUNDED when
    some ratio is >= 1.
    """
    mags = list(magnitudes)
    if not mags:
        raise ValueError("need at least one magnitude")
    n = len(mags)
    if n == 1:
        return 1
    prec = max(precision_of(mags[0]), 64)
    with context(prec):
        ref = mpfr(mags[0])
        rho = max(mpfr(m) / ref for m in mags[1:])
        if rho >= 1:
            return UNBOUNDED
        if rho <= 0:
            return 1
        target = mpq(1, n)
        m = max(1, int(gmpy2.ceil(gmpy2.log(mpfr(n)) / -gmpy2.log(rho))))
        while rho**m > target:
            m += 1
        while m > 1 and rho ** (m - 1) <= target:
            m -= 1
        return m
