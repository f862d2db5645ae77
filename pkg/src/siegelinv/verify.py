"""Named verification suites behind the ``verify`` CLI command.

Each suite returns a list of named checks with pass/fail and a short
detail string; suites are deterministic (fixed seeds).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from . import galois, invariants, modfunc, quadforms
from .bignum import context
from .modfunc import EvalContext, SiegelIndex, siegel_value

CLASS_POLY_D20_N12 = (
    1,
    -2550974942476760820051136,
    238110589893565910129238086200,
    -2249102100642965467076167124913280,
    5677583625730635496464554293769775900,
    -31984181681760551803330979365226550023488,
    -17410059883612682120508988571419246981752,
    -9155763998650223557795196487031471321600,
    167117715935951295057696524156063178310,
    -464728779160514526974626326247201600,
    813690304957218006590231416378248,
    -1478170408753689677872738383488,
    1635793922011311753339695900,
    -989798760399582851353280,
    218685334974106886200,
    -1597283771136,
    1,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _random_sl2(rng: random.Random, max_c: int = 6, max_entry: int = 20) -> tuple[int, int, int, int]:
    """Random SL2(Z) matrix with |c| <= max_c and all entries <= max_entry;
    the c-bound keeps both evaluation points above the Im floor."""
    while True:
        c = rng.randint(-max_c, max_c)
        if c == 0:
            b = rng.randint(-max_entry, max_entry)
            return (1, b, 0, 1) if rng.random() < 0.5 else (-1, b, 0, -1)
        d = rng.randint(-max_entry, max_entry)
        if math.gcd(c, d) != 1:
            continue
        g, u, v = gmpy2.gcdext(d, -c)
        a, b = int(u), int(v)  # a*d - b*c == 1
        # reduce (a, b) by multiples of (c, d) to keep entries small
        k = round(a / c) if c else 0
        a, b = a - k * c, b - k * d
        if max(abs(a), abs(b), abs(c), abs(d)) <= max_entry:
            return (a, b, c, d)


def _tau_pair(gamma, rng: random.Random, prec: int):
    """tau with Im(tau) and Im(gamma tau) both >= 0.12."""
    a, b, c, d = gamma
    with context(prec):
        while True:
            if c == 0:
                x = mpfr(rng.uniform(-0.5, 0.5))
                y = mpfr(rng.uniform(0.6, 1.8))
            else:
                x = mpfr(-d) / c + mpfr(rng.uniform(-0.01, 0.01))
                y_hi = min(1.5, 9.5 / (c * c))
                y = mpfr(rng.uniform(0.12, max(0.13, y_hi)))
            tau = mpc(x, y)
            gtau = (a * tau + b) / (c * tau + d)
            if tau.imag > mpfr("0.12") and gtau.imag > mpfr("0.12"):
                return tau, gtau


def random_index(rng: random.Random, n: int) -> SiegelIndex:
    """Uniform level-divides-n index, excluding the integral pair."""
    while True:
        k1, k2 = rng.randrange(n), rng.randrange(n)
        if (k1, k2) != (0, 0):
            return SiegelIndex(mpq(k1, n), mpq(k2, n))


def suite_identities(prec: int = 256, cases: int = 40, seed: int = 20260809) -> list[CheckResult]:
    """Transformation and product identities of the Siegel evaluator."""
    rng = random.Random(seed)
    out = []
    tol = mpfr(10) ** -40

    worst = mpfr(0)
    for _ in range(cases):
        gamma = _random_sl2(rng)
        tau, gtau = _tau_pair(gamma, rng, prec + 64)
        n = rng.choice([2, 3, 4, 5, 7, 8, 9, 12])
        r = random_index(rng, n)
        a, b, c, d = gamma
        rg = SiegelIndex(r.r1 * a + r.r2 * c, r.r1 * b + r.r2 * d)
        with context(prec + 64):
            lhs = siegel_value(r, EvalContext.create(gtau, prec)) ** 12
            rhs = siegel_value(rg, EvalContext.create(tau, prec)) ** 12
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    out.append(CheckResult("sl2-action-12th-power", worst < tol, f"max rel err {worst:.3g}"))

    worst = mpfr(0)
    for _ in range(cases):
        n = rng.choice([5, 7, 11, 12])
        r = SiegelIndex(mpq(rng.randrange(1, n), n), mpq(rng.randrange(n), n))
        s1, s2 = rng.randint(-3, 3), rng.randint(-3, 3)
        with context(prec + 64):
            tau = mpc(mpfr(rng.uniform(-0.5, 0.5)), mpfr(rng.uniform(0.5, 2.0)))
            ctx = EvalContext.create(tau, prec)
            lhs = siegel_value(SiegelIndex(r.r1 + s1, r.r2 + s2), ctx)
            phase = (-1) ** (s1 * s2 + s1 + s2) * gmpy2.exp(
                -mpc(0, 1) * gmpy2.const_pi() * (s1 * mpfr(r.r2) - s2 * mpfr(r.r1))
            )
            rhs = phase * siegel_value(r, ctx)
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    out.append(CheckResult("translation-cocycle", worst < tol, f"max rel err {worst:.3g}"))

    worst = mpfr(0)
    ok1 = True
    for n in range(1, 9):
        for _ in range(5):
            tau = mpc(mpfr(rng.uniform(-0.5, 0.5)), mpfr(rng.uniform(0.6, 3.0)))
            ctx = EvalContext.create(tau, prec)
            with context(prec + 64):
                lhs = mpc(1)
                for w in range(1, n):
                    lhs *= siegel_value(SiegelIndex(mpq(0), mpq(w, n)), ctx) ** 12
                rhs = modfunc.delta_quotient(n, ctx)
                if n == 1:
                    ok1 = ok1 and rhs == 1
                worst = max(worst, abs(lhs - rhs) / abs(rhs))
    out.append(CheckResult("delta-quotient-identity", worst < tol and ok1,
                           f"max rel err {worst:.3g}"))
    return out


def suite_frobenius(prec: int = 256, groups: int = 20, seed: int = 1729) -> list[CheckResult]:
    """Frobenius determinant relation on random abelian groups."""
    rng = random.Random(seed)
    worst = mpfr(0)
    shapes = [(2,), (3,), (4,), (2, 2), (5,), (6,), (2, 4), (2, 2, 2), (3, 3),
              (2, 6), (12,), (16,), (13,), (2, 8), (15,), (14,)]
    for i in range(groups):
        orders = shapes[i % len(shapes)]
        group = galois.AbelianGroupSpec(orders)
        with context(prec):
            f = {g: mpc(mpfr(rng.uniform(-1, 1)), mpfr(rng.uniform(-1, 1)))
                 for g in group.elements()}
        lhs = galois.frobenius_lhs(group, f, prec)
        rhs = galois.frobenius_rhs(group, f, prec)
        with context(prec):
            worst = max(worst, abs(lhs - rhs) / abs(rhs))
    ok = worst < mpfr(10) ** -25
    return [CheckResult("frobenius-determinant", ok, f"max rel err {worst:.3g}")]


def suite_forms(seed: int = 11) -> list[CheckResult]:
    """Exact integer checks: class numbers against brute force, form
    invariants, branch determinants, degree divisibility."""
    out = []
    mismatches = []
    for d in range(-7, -201, -1):
        if not quadforms.is_fundamental(d):
            continue
        field = quadforms.make_field(d)
        forms = quadforms.reduced_forms(field)
        brute = _brute_force_class_number(d)
        if len(forms) != brute:
            mismatches.append(d)
        for f in forms:
            ok_form = (
                (-f.a < f.b <= f.a < f.c or 0 <= f.b <= f.a == f.c)
                and f.discriminant() == d
                and math.gcd(math.gcd(f.a, f.b), f.c) == 1
                and 1 <= f.a <= math.isqrt(-d // 3)
            )
            if not ok_form:
                mismatches.append(d)
    out.append(CheckResult("class-number-brute-force", not mismatches,
                           f"fundamental d in [-200, -7]; mismatches: {mismatches}"))

    bad = []
    for d, n in ((-20, 12), (-43, 2), (-47, 2), (-15, 4), (-52, 6), (-84, 10)):
        field = quadforms.make_field(d)
        data = quadforms.degree_data(field, n)
        if data.ray_over_hilbert % data.ring_over_hilbert:
            bad.append((d, n))
        for form in quadforms.reduced_forms(field):
            m = quadforms.beta_q(form, field, n)
            for p, e in quadforms.factorize(n).items():
                pe = p**e
                branch = quadforms._beta_branch(form, field, p)
                if any((m[i] - branch[i]) % pe for i in range(4)):
                    bad.append((d, n, form))
    out.append(CheckResult("beta-branch-crt", not bad, f"failures: {bad}"))
    return out


def _brute_force_class_number(d: int) -> int:
    count = 0
    a_max = math.isqrt(-d // 3)
    for a in range(1, a_max + 1):
        for b in range(-a, a + 1):
            for c in range(a, (-d + b * b) // (4 * a) + 1):
                if b * b - 4 * a * c != d:
                    continue
                if not (-a < b <= a < c or (0 <= b <= a == c)):
                    continue
                if math.gcd(math.gcd(a, b), c) != 1:
                    continue
                count += 1
    return count


def suite_paper_example(prec: int = 512) -> list[CheckResult]:
    """Bit-exact reproduction of the degree-16 class polynomial at
    (d_K, N) = (-20, 12)."""
    field = quadforms.make_field(-20)
    report = invariants.minimal_polynomial(field, 12, prec=prec, force=True)
    ok = report.polynomial.coefficients == CLASS_POLY_D20_N12
    detail = (f"coefficients {'match' if ok else 'differ'}; "
              f"max residual {report.polynomial.max_residual:.3g}")
    return [CheckResult("degree-16-class-polynomial", ok, detail),
            CheckResult("unit-constant-term", invariants.unit_check(report.polynomial),
                        f"constant term {report.polynomial.constant_term}")]


SUITES = {
    "identities": lambda: suite_identities(),
    "frobenius": lambda: suite_frobenius(),
    "forms": lambda: suite_forms(),
    "paper-example": lambda: suite_paper_example(),
}


def run_suite(name: str) -> list[CheckResult]:
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(SUITES[key]())
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return SUITES[name]()
