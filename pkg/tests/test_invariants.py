from collections import Counter

import pytest
from gmpy2 import mpc, mpfr, mpq

from siegelinv.bignum import context
from siegelinv.errors import ConditionViolated, SplitPrime
from siegelinv.galois import UNBOUNDED, conjugate_specs
from siegelinv.invariants import (
    IntPolynomial,
    _expand_and_round,
    default_family,
    delta_consistency,
    delta_ring_class_invariant,
    minimal_polynomial,
    normal_basis_certificate,
    ring_class_invariant,
    siegel_ramachandra_unit_class,
    unit_check,
)
from siegelinv.modfunc import EvalContext, SiegelIndex, siegel_power
from siegelinv.quadforms import make_field
from siegelinv.verify import CLASS_POLY_D20_N12

CUBIC_43_2 = (4096, 884736768, 48, 1)


class TestDefaultFamily:
    def test_level_twelve(self):
        fam = default_family(make_field(-20), 12)
        assert fam.exponents == {
            SiegelIndex(mpq(0), mpq(1, 12)): 24,
            SiegelIndex(mpq(0), mpq(5, 12)): 24,
        }

    def test_level_two_exponent(self):
        fam = default_family(make_field(-43), 2)
        assert fam.exponents == {SiegelIndex(mpq(0), mpq(1, 2)): 12}

    def test_power_scaling(self):
        fam = default_family(make_field(-43), 2, power=-1)
        assert fam.exponents == {SiegelIndex(mpq(0), mpq(1, 2)): -12}


class TestRingClassInvariant:
    def test_condition_gate(self):
        with pytest.raises(ConditionViolated):
            ring_class_invariant(make_field(-20), 12, 256)

    def test_single_factor_at_level_two(self):
        field = make_field(-43)
        value = ring_class_invariant(field, 2, 256)
        ctx = EvalContext.create(field.theta(320), 320)
        direct = siegel_power(SiegelIndex(mpq(0), mpq(1, 2)), 12, ctx)
        with context(256):
            assert abs(value - direct) < abs(direct) * mpfr(2) ** -240

    def test_real_to_high_relative_accuracy(self):
        value = ring_class_invariant(make_field(-20), 12, 512, force=True)
        with context(512):
            assert abs(value.imag) < abs(value) * mpfr(10) ** -50

    def test_matches_identity_conjugate(self):
        field = make_field(-43)
        value = ring_class_invariant(field, 2, 256)
        report = minimal_polynomial(field, 2, prec=256)
        with context(256):
            assert abs(value - report.conjugates[0]) < abs(value) * mpfr(2) ** -240


class TestMinimalPolynomial:
    def test_published_degree_sixteen(self):
        report = minimal_polynomial(make_field(-20), 12, prec=512, force=True)
        assert report.polynomial.coefficients == CLASS_POLY_D20_N12
        assert report.polynomial.degree == 16
        assert report.is_unit
        assert report.polynomial.max_residual < mpfr("1e-100")
        assert report.polynomial.is_squarefree()

    def test_cubic_at_inert_two(self):
        report = minimal_polynomial(make_field(-43), 2, prec=256)
        assert report.polynomial.coefficients == CUBIC_43_2
        assert not report.is_unit  # prime-power conductor
        assert report.polynomial.is_squarefree()

    def test_quartic_at_ramified_two(self):
        report = minimal_polynomial(make_field(-52), 2, prec=256)
        assert report.polynomial.coefficients == (4096, -6896961536, -3897984, -82976, 1)

    def test_conjugates_are_roots(self):
        report = minimal_polynomial(make_field(-43), 2, prec=256)
        poly = report.polynomial
        with context(256):
            for x in report.conjugates:
                bound = mpfr(2) ** -128 * (1 + abs(x)) ** poly.degree
                assert abs(poly(x)) < bound

    def test_degenerate_single_root(self):
        with context(256):
            v = mpc(mpfr("7.000000000000000000000000000000001"), mpfr("1e-60"))
        coeffs, resid = _expand_and_round([v], 256)
        assert coeffs == [-7, 1]
        assert resid < mpq(1, 10**20)

    def test_labels_align(self):
        field = make_field(-20)
        report = minimal_polynomial(field, 12, prec=512, force=True)
        specs = conjugate_specs(field, 12, default_family(field, 12))
        assert len(report.labels) == len(specs) == 16
        assert report.labels[0][1] == (1, 0, 5)


class TestUnitCheck:
    def test_published_polynomial_is_unit(self):
        poly = IntPolynomial(CLASS_POLY_D20_N12, mpfr("1e-50"), 512)
        assert unit_check(poly)

    def test_x_minus_two(self):
        assert not unit_check(IntPolynomial((-2, 1), mpfr(0), 128))

    def test_x_plus_one(self):
        assert unit_check(IntPolynomial((1, 1), mpfr(0), 128))


class TestDeltaInvariant:
    def test_split_prime_rejected(self):
        with pytest.raises(SplitPrime):
            delta_ring_class_invariant(make_field(-20), 3, 1, 256)

    def test_value_is_real(self):
        for d, p in ((-43, 3), (-43, 2), (-8, 5)):  # 5 is inert in Q(sqrt(-2))
            v = delta_ring_class_invariant(make_field(d), p, 1, 256)
            with context(256):
                assert abs(v.imag) < abs(v) * mpfr(2) ** -200

    def test_consistency_identity(self):
        for d, p in ((-43, 3), (-43, 2), (-8, 3)):
            resid = delta_consistency(make_field(d), p, 1, 320)
            assert resid < mpfr(10) ** -40

    def test_higher_level(self):
        resid = delta_consistency(make_field(-43), 2, 2, 320)
        assert resid < mpfr(10) ** -40

    def test_nonprime_rejected(self):
        with pytest.raises(ValueError):
            delta_ring_class_invariant(make_field(-43), 4, 1, 128)


class TestSiegelRamachandra:
    def test_level_two_matches_canonical_power(self):
        field = make_field(-43)
        v = siegel_ramachandra_unit_class(field, 2, 256)
        ctx = EvalContext.create(field.theta(320), 320)
        direct = siegel_power(SiegelIndex(mpq(0), mpq(1, 2)), 24, ctx)
        with context(256):
            assert abs(v - direct) < abs(direct) * mpfr(2) ** -230

    def test_regression_value(self):
        v = siegel_ramachandra_unit_class(make_field(-43), 3, 256)
        with context(256):
            expected = mpfr("-5.594230726499034313984457677075597789112e-19")
            assert abs(v.real - expected) < abs(expected) * mpfr(10) ** -35
            assert abs(v.imag) < abs(v) * mpfr(2) ** -200

    def test_scalar_action_permutes_invariant_family(self):
        """The scalar subgroup permutes the (0, w/N) index orbit, so the
        full product is scalar-invariant."""
        from siegelinv.galois import GLMatModN, act_on_index

        n = 12
        field = make_field(-20)
        fam = default_family(field, n)
        base_keys = Counter(r.orbit_key() for r, _ in fam.items)
        for t in (1, 5, 7, 11):
            scalar = GLMatModN((t, 0, 0, t), n)
            acted = Counter(act_on_index(r, scalar).orbit_key() for r, _ in fam.items)
            assert acted == base_keys


class TestNormalBasisCertificate:
    def test_inert_two(self):
        report = normal_basis_certificate(make_field(-43), 2, 256)
        assert len(report.ratios) == 2
        assert all(r < 1 for r in report.ratios)
        assert report.normal_basis_exponent == 1
        with context(256):
            for r in report.ratios:
                assert abs(r - mpfr("1.5564631e-10")) < mpfr("1e-16")

    def test_split_two_class_number_five(self):
        report = normal_basis_certificate(make_field(-47), 2, 256)
        assert len(report.ratios) == 4
        assert all(r < 1 for r in report.ratios)
        assert report.normal_basis_exponent == 1

    def test_ramified_two(self):
        report = normal_basis_certificate(make_field(-52), 2, 256)
        assert len(report.ratios) == 3
        assert all(r < 1 for r in report.ratios)

    def test_condition_gate(self):
        with pytest.raises(ConditionViolated):
            normal_basis_certificate(make_field(-20), 12, 256)

    def test_attached_polynomial_is_integral(self):
        report = normal_basis_certificate(make_field(-43), 2, 256)
        assert report.polynomial.coefficients == CUBIC_43_2

    def test_inverse_values(self):
        report = normal_basis_certificate(make_field(-43), 2, 256)
        direct = minimal_polynomial(make_field(-43), 2, prec=256)
        with context(256):
            product = report.value * direct.value
            assert abs(product - 1) < mpfr(2) ** -230


class TestReportInvariants:
    def test_direct_invariant_exponent_unbounded(self):
        # identity conjugate of the direct value is the smallest, so no
        # power satisfies the magnitude criterion
        report = minimal_polynomial(make_field(-43), 2, prec=256)
        assert report.normal_basis_exponent is UNBOUNDED

    def test_degree_equals_conjugate_count(self):
        report = minimal_polynomial(make_field(-15), 4, prec=256, force=True)
        assert report.polynomial.degree == len(report.conjugates) == 4
