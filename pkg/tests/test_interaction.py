"""Two-center quadrature tests: scaling identity, decay-law fits, tails.

The 1D interaction constant has a symbolic oracle: for p = 4 the
soliton is sqrt(2) sech x, so w(d) = ∫ U³(x) U(x-d) dx tends to
C ∫ U³ e^x dx e^(-d) = (2 sqrt 2)(4 sqrt 2) e^(-d) = 16 e^(-d).
In 3D the same construction gives B1 = C |S^2| ∫ U³ (sinh s / s) s² ds,
an independent check on the plateau fit.
"""

import math

import numpy as np
import pytest
from scipy.integrate import simpson

from multibump.errors import ConfigurationError
from multibump.interaction import (
    cross_term,
    interaction_constant,
    pair_sum,
    potential_tail,
    two_center_integral,
)
from multibump.params import PeakConfiguration, PotentialModel

B1_1D_P4_SYMBOLIC = 16.0


class TestCrossTerm:
    def test_coincident_centers_give_Ip(self, profile_3d_p4):
        w0 = cross_term(profile_3d_p4, 1.0, 0.0)
        assert w0 == pytest.approx(profile_3d_p4.moments.Ip, rel=1e-6)

    def test_scaling_identity(self, profile_3d_p4, rng):
        for _ in range(8):
            eps = rng.uniform(0.2, 1.6)
            d = rng.uniform(1.0, 12.0)
            lhs = cross_term(profile_3d_p4, eps, d)
            rhs = eps**3 * cross_term(profile_3d_p4, 1.0, d / eps)
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_center_swap_symmetry(self, profile_3d_p4):
        # exchanging the roles of the two centers (translation+reflection)
        prof = profile_3d_p4
        p = prof.params.p
        d = 6.0
        R = 30.0

        def f(s):
            return prof.evaluate(s) ** (p - 1.0)

        def g(t):
            return prof.evaluate(t)

        direct = two_center_integral(f, g, d, 3, R, R, panel=0.75)
        swapped = two_center_integral(g, f, d, 3, R, R, panel=0.75)
        assert direct == pytest.approx(swapped, rel=1e-10)

    def test_quadrature_convergence_under_refinement(self, profile_3d_p4):
        prof = profile_3d_p4
        p = prof.params.p

        def f(s):
            return prof.evaluate(s) ** (p - 1.0)

        def g(t):
            return prof.evaluate(t)

        coarse = two_center_integral(f, g, 12.0, 3, 36.0, 36.0, panel=0.75)
        fine = two_center_integral(f, g, 12.0, 3, 36.0, 36.0, panel=0.375)
        assert abs(fine - coarse) / abs(fine) < 1e-8

    def test_monotone_decreasing_in_d(self, profile_3d_p4):
        d = np.linspace(0.0, 10.0, 6)
        w = [cross_term(profile_3d_p4, 1.0, di) for di in d]
        assert all(a > b > 0.0 for a, b in zip(w, w[1:]))


class TestInteractionConstant:
    def test_1d_p4_matches_symbolic_oracle(self, profile_1d_p4):
        fit = interaction_constant(profile_1d_p4, 12.0, 16.0, 5)
        assert fit.B1_hat == pytest.approx(B1_1D_P4_SYMBOLIC, rel=1e-6)
        assert not fit.non_plateau_warning

    def test_3d_matches_analytic_formula(self, profile_3d_p4):
        # B1 = C |S^(N-1)| ... for N=3 reduces to 4 pi C ∫ U³ sinh(s) s ds
        prof = profile_3d_p4
        g, U = prof.r_grid, prof.U_values
        analytic = prof.decay_C * 4.0 * math.pi * simpson(U**3 * np.sinh(g) * g, x=g)
        fit = interaction_constant(prof, 12.0, 16.0, 5)
        assert fit.B1_hat == pytest.approx(analytic, rel=1e-6)

    def test_3d_plateau_tight(self, profile_3d_p4):
        fit = interaction_constant(profile_3d_p4, 12.0, 16.0, 5)
        assert fit.plateau_variation < 0.03

    def test_w_values_decreasing(self, profile_3d_p4):
        fit = interaction_constant(profile_3d_p4, 12.0, 16.0, 7)
        assert np.all(np.diff(fit.w_values) < 0.0)

    def test_window_validation(self, profile_3d_p4):
        with pytest.raises(ConfigurationError):
            interaction_constant(profile_3d_p4, 4.0, 8.0, 5)
        with pytest.raises(ConfigurationError):
            interaction_constant(profile_3d_p4, 12.0, 16.0, 3)


class TestPotentialTail:
    def test_tail_law_plus(self, profile_3d_p4):
        pot = PotentialModel(sign=+1, a=1.0, m=2.0)
        T = potential_tail(profile_3d_p4, 1.0, pot, 40.0)
        ratio = T * 40.0**2 / (pot.a * profile_3d_p4.moments.I2)
        assert 0.95 < ratio < 1.05

    def test_tail_law_minus_mirrors(self, profile_3d_p4):
        plus = PotentialModel(sign=+1, a=0.5, m=2.0)
        minus = PotentialModel(sign=-1, a=0.5, m=2.0)
        Tp = potential_tail(profile_3d_p4, 1.0, plus, 30.0)
        Tm = potential_tail(profile_3d_p4, 1.0, minus, 30.0)
        assert Tm == pytest.approx(-Tp, rel=1e-12)

    def test_small_a_limit(self, profile_3d_p4):
        tiny = PotentialModel(sign=+1, a=1e-12, m=2.0)
        T = potential_tail(profile_3d_p4, 1.0, tiny, 20.0)
        assert abs(T) < 1e-12

    def test_sign_matches_potential(self, profile_3d_p4):
        pot = PotentialModel(sign=+1, a=1.0, m=2.0)
        assert potential_tail(profile_3d_p4, 0.5, pot, 15.0) > 0.0

    def test_scaled_bump(self, profile_3d_p4):
        # per-peak tail term carries the eps^N volume factor
        pot = PotentialModel(sign=+1, a=1.0, m=2.0)
        eps = 0.5
        T = potential_tail(profile_3d_p4, eps, pot, 40.0)
        expected = pot.a * eps**3 * profile_3d_p4.moments.I2 / 40.0**2
        assert T == pytest.approx(expected, rel=0.05)


class TestPairSum:
    def test_k2_single_pair(self, profile_3d_p4):
        config = PeakConfiguration(k=2, r=4.0, mode="same_sign")
        total = pair_sum(profile_3d_p4, 1.0, config)
        assert total == pytest.approx(cross_term(profile_3d_p4, 1.0, 8.0), rel=1e-12)

    def test_k6_nearest_neighbor_dominates(self, profile_3d_p4):
        # 2r sin(pi/6) = r >= 10 eps puts >95% of the sum in the c=1 class
        eps = 1.0
        r = 10.5
        config = PeakConfiguration(k=6, r=r, mode="same_sign")
        total = pair_sum(profile_3d_p4, eps, config)
        nn = 6.0 * cross_term(profile_3d_p4, eps, 2.0 * r * math.sin(math.pi / 6.0))
        assert nn / total > 0.95

    def test_alternating_adjacent_pairs_negative_product(self, profile_3d_p4):
        # adjacent peaks carry opposite signs, so the c=1 class enters the
        # sum negatively and the total is negative when NN dominates
        config = PeakConfiguration(k=3, r=6.0, mode="alternating")
        total = pair_sum(profile_3d_p4, 0.5, config)
        assert total < 0.0

    def test_k1_no_pairs(self, profile_3d_p4):
        config = PeakConfiguration(k=1, r=3.0, mode="same_sign")
        assert pair_sum(profile_3d_p4, 1.0, config) == 0.0
