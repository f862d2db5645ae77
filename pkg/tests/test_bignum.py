import random

import gmpy2
import pytest
from gmpy2 import mpc, mpfr, mpq
from hypothesis import given
from hypothesis import strategies as st

from siegelinv.bignum import (
    cexp,
    context,
    mpq_ceil,
    mpq_floor,
    precision_of,
    retry_with_doubling,
    root_of_unity,
    round_to_integer,
    to_complex,
    to_real,
)
from siegelinv.errors import AmbiguousRounding, ExponentRangeError


def test_context_rejects_low_precision():
    with pytest.raises(ValueError):
        context(32)


def test_cexp_identity_cases():
    prec = 256
    z0 = to_complex(0, prec)
    assert cexp(z0) == 1
    with context(prec):
        zpi = mpc(0, 1) * gmpy2.const_pi()
    tol = mpfr(2) ** (-prec + 4)
    assert abs(cexp(zpi) + 1) < tol
    with context(prec):
        zq = mpc(0, 2) * gmpy2.const_pi() * mpfr("0.25")
    assert abs(cexp(zq) - mpc(0, 1)) < tol


def test_cexp_inverse_product():
    prec = 192
    rng = random.Random(3)
    tol = mpfr(2) ** (-prec + 8)
    for _ in range(30):
        with context(prec):
            z = mpc(mpfr(rng.uniform(-10, 10)), mpfr(rng.uniform(-10, 10)))
            err = abs(cexp(z) * cexp(-z) - 1)
        assert err < tol


def test_cexp_overflow_raises():
    z = to_complex(mpfr("1e19"), 128)
    with pytest.raises(ExponentRangeError):
        cexp(z)


def test_root_of_unity_table():
    prec = 128
    assert root_of_unity(1, 0, prec) == 1
    tol = mpfr(2) ** (-prec + 4)
    assert abs(root_of_unity(4, 1, prec) - mpc(0, 1)) < tol
    assert abs(root_of_unity(12, 6, prec) + 1) < tol


def test_root_of_unity_inverse_pairs():
    prec = 96
    tol = to_real(mpq(1, 2**80), prec)
    for n in range(1, 101):
        for k in range(n):
            with context(prec):
                prod = root_of_unity(n, k, prec) * root_of_unity(n, n - k, prec)
                assert abs(prod - 1) < tol
                assert abs(abs(root_of_unity(n, k, prec)) - 1) < tol


def test_mpq_floor_ceil_exact_on_big_values():
    big = mpq(10**60 + 1, 3)
    assert mpq_floor(big) == (10**60 + 1) // 3
    assert mpq_ceil(big) == -((-(10**60 + 1)) // 3)
    assert mpq_floor(mpq(-7, 2)) == -4
    assert mpq_ceil(mpq(-7, 2)) == -3


def test_round_to_integer_basic():
    x = to_real("2.9999999999", 256)
    n, resid = round_to_integer(x, mpq(1, 10**6))
    assert n == 3
    assert resid < mpq(1, 10**9)


def test_round_to_integer_tie_raises():
    x = to_real("0.5", 128)
    with pytest.raises(AmbiguousRounding) as info:
        round_to_integer(x, mpq(1, 10**6))
    assert info.value.tie


def test_round_to_integer_excess_residual():
    x = to_real("2.4", 128)
    with pytest.raises(AmbiguousRounding) as info:
        round_to_integer(x, mpq(1, 10**6))
    assert not info.value.tie


def test_round_to_integer_huge_coefficient():
    # scale comparable to the degree-16 polynomial's mid coefficients
    x = to_real("-1597283771136.0000000003", 512)
    n, resid = round_to_integer(x, mpq(1, 10**6))
    assert n == -1597283771136
    assert mpq(1, 10**11) < mpq(resid) < mpq(1, 10**9)


def test_round_to_integer_very_large_magnitude():
    with context(512):
        x = mpfr(31984181681760551803330979365226550023488) + mpfr("0.25")
    with pytest.raises(AmbiguousRounding):
        round_to_integer(x, mpq(1, 10**8))
    with context(512):
        x = mpfr(31984181681760551803330979365226550023488) + mpfr(1) / mpfr(10**12)
    n, _ = round_to_integer(x, mpq(1, 10**8))
    assert n == 31984181681760551803330979365226550023488


@given(st.integers(min_value=-(10**20), max_value=10**20),
       st.integers(min_value=-(10**6), max_value=10**6))
def test_round_to_integer_doubling_invariance(base, jitter_num):
    """If rounding succeeds at precision p, it returns the same integer at 2p."""
    prec = 128
    with context(prec):
        x = mpfr(base) + mpfr(jitter_num) / mpfr(10**13)
    try:
        n1, _ = round_to_integer(x, mpq(1, 10**6))
    except AmbiguousRounding:
        return
    with context(2 * prec):
        x2 = mpfr(base) + mpfr(jitter_num) / mpfr(10**13)
    n2, _ = round_to_integer(x2, mpq(1, 10**6))
    assert n1 == n2


def test_retry_with_doubling():
    calls = []

    def fn(prec):
        calls.append(prec)
        if prec < 512:
            raise AmbiguousRounding("not yet")
        return prec

    assert retry_with_doubling(fn, 128, retries=3) == 512
    assert calls == [128, 256, 512]

    with pytest.raises(AmbiguousRounding):
        retry_with_doubling(fn, 64, retries=1)


def test_precision_of():
    assert precision_of(to_real(1, 200)) == 200
    assert precision_of(to_complex(1, 200)) == 200
