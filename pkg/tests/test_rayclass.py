import pytest
from gmpy2 import mpc, mpfr, mpq

from siegelinv.bignum import context, root_of_unity
from siegelinv.modfunc import EvalContext, SiegelIndex, siegel_value
from siegelinv.quadforms import make_field
from siegelinv.rayclass import (
    FULL,
    GammaParams,
    HenselParams,
    _matmul,
    _matpow,
    _translation_phase_exponent,
    cexp_turns,
    congruence_satisfied,
    fixed_field_solution,
    g_theta_product,
    gamma_action_exponents,
    gamma_element,
    gamma_elements,
    gamma_generators,
    hensel_beta0,
    labels,
    normal_basis_value,
    p_valuation,
    verify_contraction,
)


class TestGammaParams:
    def test_validation(self):
        field = make_field(-20)
        with pytest.raises(ValueError):
            GammaParams(p=3, m=1, field=field)  # p < 5
        with pytest.raises(ValueError):
            GammaParams(p=6, m=1, field=field)  # composite
        with pytest.raises(ValueError):
            GammaParams(p=5, m=10, field=field)  # shared factor


class TestGammaGenerators:
    def test_explicit_matrices(self):
        gp = GammaParams(p=5, m=1, field=make_field(-20))
        alpha, beta = gamma_generators(gp)
        assert alpha == (6, 0, 0, 6)
        assert beta == (1, 0, 5, 1)  # -C_theta*p*m = -25 == 0 mod 25

        gp = GammaParams(p=5, m=1, field=make_field(-7))
        alpha, beta = gamma_generators(gp)
        assert alpha == (6, 0, 0, 6)
        # (1 - B*pm, -C*pm; pm, 1) with B=1, C=2: (-4, -10; 5, 1) mod 25
        assert beta == (21, 15, 5, 1)

    def test_generator_order_p(self):
        for d in (-20, -7):
            for p, m in ((5, 1), (5, 2), (7, 1)):
                gp = GammaParams(p=p, m=m, field=make_field(d))
                mod = gp.modulus
                for gen in gamma_generators(gp):
                    power = _matpow(gen, p)
                    power = tuple(x % mod for x in power)
                    assert power == (1 % mod, 0, 0, 1 % mod)
                    smaller = tuple(x % mod for x in _matpow(gen, 1))
                    assert smaller != (1, 0, 0, 1)

    def test_enumeration_exact_count(self):
        for p, m, d in ((5, 1, -20), (5, 2, -7), (7, 1, -20), (7, 2, -7)):
            gp = GammaParams(p=p, m=m, field=make_field(d))
            elements = gamma_elements(gp)
            assert len(elements) == p * p
            assert len(set(elements)) == p * p

    def test_closed_form_matches_products(self):
        for d in (-20, -7):
            gp = GammaParams(p=5, m=2, field=make_field(d))
            alpha, beta = gamma_generators(gp)
            mod = gp.modulus
            for k in range(5):
                for ell in range(5):
                    direct = _matmul(_matpow(alpha, k), _matpow(beta, ell))
                    direct = tuple(x % mod for x in direct)
                    assert direct == gamma_element(k, ell, gp)


class TestFixedFieldSolutions:
    def test_label_set(self):
        assert labels(5) == [(0, 1), (1, 0), (1, 1), (1, 2), (1, 3), (1, 4)]

    def test_table_rows(self):
        gp = GammaParams(p=5, m=1, field=make_field(-7))  # B_theta = 1
        assert fixed_field_solution((1, 0), gp) == (0, 1)
        # 6' = 1 mod 5, so y = m * 1 * (5 - 1) = 4
        assert fixed_field_solution((0, 1), gp) == (1, 4)

    def test_nonnegative(self):
        for d in (-20, -7):
            for p, m in ((5, 1), (7, 2)):
                gp = GammaParams(p=p, m=m, field=make_field(d))
                for label in labels(p):
                    x, y = fixed_field_solution(label, gp)
                    assert x >= 0 and y >= 0

    def test_own_congruence_holds_others_fail(self):
        for d in (-20, -7):
            for p, m in ((5, 1), (5, 2), (7, 1), (7, 2)):
                gp = GammaParams(p=p, m=m, field=make_field(d))
                for label in labels(p):
                    x, y = fixed_field_solution(label, gp)
                    assert gamma_action_exponents(label, x, y, gp) == 0
                    others = [
                        other for other in labels(p)
                        if other != label and congruence_satisfied(other, x, y, gp)
                    ]
                    assert others == []  # satisfied by exactly one subgroup

    def test_exponent_examples(self):
        gp = GammaParams(p=5, m=1, field=make_field(-20))
        assert gamma_action_exponents((1, 0), 0, 1, gp) == 0
        moved = gamma_action_exponents((0, 1), 0, 1, gp)
        assert moved != 0 and moved == (-30) % 25


class TestNormalBasisValue:
    def test_geometric_sum_recomputed(self):
        gp = GammaParams(p=5, m=1, field=make_field(-20))
        nb = normal_basis_value((1, 0), gp, 192)
        assert (nb.x, nb.y) == (0, 1)
        ctx = EvalContext.create(gp.field.theta(256), 256)
        g = siegel_value(SiegelIndex(mpq(0), mpq(1, 5)), ctx)
        with context(256):
            expected = mpc(0)
            for s in range(5):
                expected += g ** (12 * s)
            assert abs(nb.value - expected) < abs(expected) * mpfr(2) ** -180

    def test_zeta_label_uses_reduced_y(self):
        gp = GammaParams(p=7, m=2, field=make_field(-20))  # B_theta = 0
        nb = normal_basis_value((0, 1), gp, 128)
        assert nb.y == nb.y_unreduced % 7
        assert nb.y == 0  # y == m*6'*(p - 0) == 0 mod 7
        # with y reduced to 0 the sum is over pure roots of unity
        with context(192):
            expected = mpc(0)
            for s in range(7):
                expected += root_of_unity(49, s, 192)
            assert abs(nb.value - expected) < mpfr(2) ** -100

    def test_full_label(self):
        gp = GammaParams(p=5, m=1, field=make_field(-7))
        nb = normal_basis_value(FULL, gp, 192)
        ctx = EvalContext.create(gp.field.theta(256), 256)
        g = siegel_value(SiegelIndex(mpq(0), mpq(1, 5)), ctx)
        with context(256):
            zsum = mpc(0)
            gsum = mpc(0)
            for s in range(5):
                zsum += root_of_unity(25, s, 256)
                gsum += g ** (12 * s)
            expected = zsum * gsum
            assert abs(nb.value - expected) < abs(expected) * mpfr(2) ** -170


class TestHensel:
    ALL_PARAMS = [(5, 1, 1, 2), (5, 1, 1, 3), (7, 2, 1, 2)]

    def test_params_validation(self):
        with pytest.raises(ValueError):
            HenselParams(p=5, m=1, n=1, ell=1)  # n < 2 ell
        with pytest.raises(ValueError):
            HenselParams(p=4, m=1, n=2, ell=1)

    def test_determinant_exactly_one(self):
        for p, m, ell, n in self.ALL_PARAMS:
            for d in (-20, -7):
                beta0 = hensel_beta0(HenselParams(p=p, m=m, n=n, ell=ell), make_field(d))
                assert beta0[0] * beta0[3] - beta0[1] * beta0[2] == 1

    def test_base_congruence(self):
        for p, m, ell, n in self.ALL_PARAMS:
            hp = HenselParams(p=p, m=m, n=n, ell=ell)
            for d in (-20, -7):
                beta0 = hensel_beta0(hp, make_field(d))
                mod = p**ell * m
                assert all((beta0[i] - (1, 0, 0, 1)[i]) % mod == 0 for i in range(4))

    def test_contraction_certificate(self):
        for p, m, ell, n in self.ALL_PARAMS:
            hp = HenselParams(p=p, m=m, n=n, ell=ell)
            for d in (-20, -7):
                beta0 = hensel_beta0(hp, make_field(d))
                rows = verify_contraction(beta0, hp)
                assert len(rows) == hp.max_power_index + 1
                for row in rows:
                    assert row["congruent_to_identity"]
                    assert row["valuation_exact"]
                    assert row["unit_cofactor"]

    def test_known_small_lift(self):
        # p=5, m=1, ell=1, n=2, B=0, C=5: x0 == 0 works and beta is already
        # its own minimal lift
        hp = HenselParams(p=5, m=1, n=2, ell=1)
        beta0 = hensel_beta0(hp, make_field(-20))
        assert beta0 == (1, 0, 5, 1)

    def test_p_valuation(self):
        assert p_valuation(50, 5) == 2
        assert p_valuation(7, 5) == 0
        with pytest.raises(ValueError):
            p_valuation(0, 5)


class TestGThetaProduct:
    def test_trivial_orbit_at_n_equals_two_ell(self):
        hp = HenselParams(p=5, m=1, n=2, ell=1)
        out = g_theta_product(hp, make_field(-20), 192)
        assert len(out.index_orbit) == 1
        assert out.index_orbit[0] == SiegelIndex(mpq(0), mpq(1, 5))

    def test_orbit_levels(self):
        hp = HenselParams(p=5, m=1, n=3, ell=1)
        out = g_theta_product(hp, make_field(-20), 192)
        assert len(out.index_orbit) == 5
        assert all(idx.level == 25 for idx in out.index_orbit)

    def test_shift_ratio_is_root_of_unity(self):
        for p, m, ell, n in TestHensel.ALL_PARAMS:
            hp = HenselParams(p=p, m=m, n=n, ell=ell)
            for d in (-20, -7):
                out = g_theta_product(hp, make_field(d), 256)
                assert out.ratio_power_error < mpfr(2) ** -128
                with context(256):
                    assert abs(out.ratio - out.predicted_ratio) < mpfr(2) ** -128

    def test_phase_bookkeeping_against_direct_evaluation(self):
        """A translated index evaluated directly must equal the canonical
        value times the exact phase."""
        field = make_field(-20)
        ctx = EvalContext.create(field.theta(320), 256)
        r1, r2 = mpq(7, 5), mpq(-11, 25)
        exponent = 12
        phase = _translation_phase_exponent(r1, r2, exponent)
        canonical = SiegelIndex(r1, r2).canonical()
        with context(256):
            direct = siegel_value(SiegelIndex(r1, r2), ctx) ** exponent
            via_phase = cexp_turns(phase, 256) * siegel_value(canonical, ctx) ** exponent
            assert abs(direct - via_phase) < abs(direct) * mpfr(2) ** -200
