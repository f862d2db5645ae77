"""Exact integer arithmetic of imaginary quadratic fields.

Reduced binary quadratic forms and class numbers, CM points, the
Shimura-reciprocity form matrices assembled prime-by-prime, and the
class-field degree formulas.  Everything here is exact integer work; the
only floating point is the on-demand numeric value of a CM point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .bignum import context
from .errors import ExcludedField, NotFundamental

Mat2 = tuple[int, int, int, int]  # row-major (a, b, c, d) for (a b; c d)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine at conductor scale."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        f += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorize(n).values())


def is_fundamental(d: int) -> bool:
    """True iff d is the discriminant of the ring of integers of Q(sqrt(d))."""
    if d >= 0:
        return False
    if d % 4 == 1:
        return _is_squarefree(-d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _is_squarefree(-m)
    return False


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), including the (a/2) convention."""
    return int(gmpy2.kronecker(a, n))


@dataclass(frozen=True)
class ImQuadField:
    """Imaginary quadratic field of fundamental discriminant d_k <= -7.

    theta = (-b_theta + sqrt(d_k))/2 generates the ring of integers, with
    minimal polynomial X^2 + b_theta*X + c_theta over Q.
    """

    d_k: int
    b_theta: int
    c_theta: int
    class_number: int

    def theta(self, prec: int) -> mpc:
        with context(prec):
            return (mpfr(-self.b_theta) + mpc(0, 1) * gmpy2.sqrt(mpfr(-self.d_k))) / 2


@dataclass(frozen=True, order=True)
class ReducedForm:
    """Reduced primitive positive definite form a*X^2 + b*X*Y + c*Y^2."""

    a: int
    b: int
    c: int

    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def is_identity(self) -> bool:
        return self.a == 1


@dataclass(frozen=True)
class CMPoint:
    """Upper-half-plane point (-b + sqrt(d_k))/(2a) attached to a form."""

    form: ReducedForm
    d_k: int

    def value(self, prec: int) -> mpc:
        with context(prec):
            return (mpfr(-self.form.b) + mpc(0, 1) * gmpy2.sqrt(mpfr(-self.d_k))) / (
                2 * self.form.a
            )


@dataclass(frozen=True)
class DegreeData:
    """Degrees of the ray and ring class fields attached to conductor N."""

    phi_ideal: int
    w_nok: int
    ray_over_hilbert: int
    ring_over_hilbert: int
    ring_over_k: int


@lru_cache(maxsize=None)
def make_field(d_k: int) -> ImQuadField:
    """Validate d_k and build the field context.

    Rejects -3 and -4 (extra units) and any non-fundamental discriminant.
    """
    if d_k in (-3, -4):
        raise ExcludedField(f"d_K = {d_k}: fields with extra roots of unity are excluded")
    if not is_fundamental(d_k):
        raise NotFundamental(f"{d_k} is not a fundamental discriminant")
    if d_k % 4 == 0:
        b, c = 0, -d_k // 4
    else:
        b, c = 1, (1 - d_k) // 4
    h = len(_reduced_forms_raw(d_k))
    return ImQuadField(d_k=d_k, b_theta=b, c_theta=c, class_number=h)


@lru_cache(maxsize=None)
def _reduced_forms_raw(d_k: int) -> tuple[ReducedForm, ...]:
    out = []
    a_max = math.isqrt(-d_k // 3)
    for a in range(1, a_max + 1):
        for b in range(-a + 1, a + 1):
            num = b * b - d_k
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if a == c and b < 0:
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            out.append(ReducedForm(a, b, c))
    return tuple(sorted(out))


def reduced_forms(field: ImQuadField) -> list[ReducedForm]:
    """One reduced form per ideal class, identity form first, sorted by (a, b)."""
    return list(_reduced_forms_raw(field.d_k))


def cm_point(form: ReducedForm, field: ImQuadField) -> CMPoint:
    return CMPoint(form=form, d_k=field.d_k)


def _beta_branch(form: ReducedForm, field: ImQuadField, p: int) -> Mat2:
    a, b, c = form.a, form.b, form.c
    if field.d_k % 4 == 0:
        if a % p:
            return (a, b // 2, 0, 1)
        if c % p:
            return (-b // 2, -c, 1, 0)
        return (-b // 2 - a, -b // 2 - c, 1, -1)
    if a % p:
        return (a, (b - 1) // 2, 0, 1)
    if c % p:
        return ((-b - 1) // 2, -c, 1, 0)
    return ((-b - 1) // 2 - a, (1 - b) // 2 - c, 1, -1)


def _crt(residues: list[tuple[int, int]]) -> int:
    x, modulus = 0, 1
    for value, m in residues:
        inv = pow(modulus % m, -1, m)
        x += modulus * ((value - x) * inv % m)
        modulus *= m
    return x % modulus


def beta_q(form: ReducedForm, field: ImQuadField, n: int) -> Mat2:
    """Shimura-reciprocity matrix of a form, assembled mod n.

    For each prime p | n the branch is selected by divisibility of a and c
    (exhaustive by primitivity), taken mod p^(v_p(n)), and the entries are
    combined by the Chinese remainder theorem.   The result is invertible
    mod n.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    fac = factorize(n)
    entries = []
    for i in range(4):
        residues = []
        for p, e in fac.items():
            pe = p**e
            residues.append((_beta_branch(form, field, p)[i] % pe, pe))
        entries.append(_crt(residues))
    m = (entries[0], entries[1], entries[2], entries[3])
    det = (m[0] * m[3] - m[1] * m[2]) % n
    if math.gcd(det, n) != 1:
        raise AssertionError(f"beta matrix not invertible mod {n}: {m}")
    return m


def degree_data(field: ImQuadField, n: int) -> DegreeData:
    """Class-field degrees for conductor n over the field.

    phi_ideal is the ideal Euler function of n*O_K, computed
    multiplicatively from the splitting type of each p | n; the unit-index
    correction [O_K^* : O^*] is 1 for every admitted field.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    phi = 1
    ring = n
    for p, e in factorize(n).items():
        sym = kronecker(field.d_k, p)
        if sym == 1:
            phi *= (p - 1) ** 2 * p ** (2 * e - 2)
        elif sym == -1:
            phi *= (p * p - 1) * p ** (2 * e - 2)
        else:
            phi *= (p - 1) * p ** (2 * e - 1)
        ring = ring * (p - sym) // p
    w_nok = 2 if n == 2 else 1
    ray = phi * w_nok // 2
    data = DegreeData(
        phi_ideal=phi,
        w_nok=w_nok,
        ray_over_hilbert=ray,
        ring_over_hilbert=ring,
        ring_over_k=ring * field.class_number,
    )
    if data.ray_over_hilbert % data.ring_over_hilbert:
        raise AssertionError(f"degree formulas inconsistent for d_K={field.d_k}, N={n}")
    return data
