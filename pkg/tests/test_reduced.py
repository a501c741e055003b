"""Reduced-energy tests: geometry, optimizer/balance cross-validation,
scaling toward the k ln k law, and window endpoint structure."""

import math

import numpy as np
import pytest

from multibump.errors import ConfigurationError, NoRootError
from multibump.ground_state import get_profile
from multibump.interaction import interaction_constant
from multibump.params import (
    PeakConfiguration,
    PotentialModel,
    WindowSpec,
    peak_positions,
)
from multibump.reduced import (
    balance_radius,
    optimize_radius,
    reduced_F,
    reduced_F1,
    reduced_constants,
    scaling_table,
    window_sign_check,
)

# defaults used throughout the scaling checks: chosen so k = 64 already
# sits inside the +-30% window and the o(1) correction shrinks visibly
SS = dict(eps=0.1, pot=PotentialModel(sign=+1, a=0.4, m=2.0))
ALT = dict(eps=0.08, pot=PotentialModel(sign=-1, a=0.9, m=2.0))


@pytest.fixture(scope="module")
def consts_ss(profile_3d_p4_mod):
    B1 = interaction_constant(profile_3d_p4_mod).B1_hat
    return reduced_constants(profile_3d_p4_mod, SS["eps"], B1)


@pytest.fixture(scope="module")
def consts_alt(profile_3d_p4_mod):
    B1 = interaction_constant(profile_3d_p4_mod).B1_hat
    return reduced_constants(profile_3d_p4_mod, ALT["eps"], B1)


@pytest.fixture(scope="module")
def profile_3d_p4_mod():
    return get_profile(3, 4.0)


class TestPeakGeometry:
    def test_single_peak(self):
        config = PeakConfiguration(k=1, r=5.0, mode="same_sign")
        pairs = peak_positions(config)
        assert len(pairs) == 1
        np.testing.assert_allclose(pairs[0][0], [5.0, 0.0, 0.0], atol=1e-14)
        assert pairs[0][1] == 1.0

    def test_k4_right_angles(self):
        config = PeakConfiguration(k=4, r=1.0, mode="same_sign")
        angles = sorted(math.atan2(p[1], p[0]) % (2 * math.pi)
                        for p, _ in peak_positions(config))
        np.testing.assert_allclose(angles, [0.0, np.pi / 2, np.pi, 3 * np.pi / 2],
                                   atol=1e-12)

    def test_alternating_k2_four_points(self):
        config = PeakConfiguration(k=2, r=1.0, mode="alternating")
        pairs = peak_positions(config)
        assert len(pairs) == 4
        signs = [s for _, s in pairs]
        assert signs == [-1.0, 1.0, -1.0, 1.0]
        for pos, _ in pairs:
            assert np.linalg.norm(pos) == pytest.approx(1.0)

    def test_rotation_invariance_of_pair_structure(self):
        # relabeling j -> j+1 leaves the chord classes unchanged
        config = PeakConfiguration(k=7, r=3.0, mode="same_sign")
        chords, mult, sgn = config.chord_classes()
        pos = config.positions()
        dists = sorted(
            np.linalg.norm(pos[i] - pos[j])
            for i in range(7) for j in range(i + 1, 7)
        )
        expanded = sorted(np.repeat(chords, mult.astype(int)))
        np.testing.assert_allclose(dists, expanded, rtol=1e-12)


class TestReducedF:
    def test_single_peak_closed_form(self, consts_ss):
        # no pairs: F = alpha + (1/2) sign a beta / r^m
        r = 7.0
        pot = SS["pot"]
        val = reduced_F(r, 1, "same_sign", consts_ss, pot)
        expected = consts_ss.alpha + 0.5 * pot.sign * pot.a * consts_ss.beta / r**2
        assert val == pytest.approx(expected, rel=1e-12)

    def test_same_sign_interaction_negative(self, consts_ss):
        # pair contribution lowers F for same-sign rings
        pot = SS["pot"]
        k, r = 8, 2.0
        with_pairs = reduced_F1(r, k, "same_sign", consts_ss, pot)
        tail_only = 0.5 * k * pot.sign * pot.a * consts_ss.beta / r**2
        assert with_pairs < tail_only

    def test_alternating_nn_contribution_positive(self, consts_alt):
        pot = ALT["pot"]
        k, r = 8, 2.0
        f_full = reduced_F1(r, k, "alternating", consts_alt, pot, exact_pairs=False)
        tail_only = 0.5 * 2 * k * pot.sign * pot.a * consts_alt.beta / r**2
        assert f_full > tail_only

    def test_exact_vs_nearest_neighbor_close(self, consts_ss, profile_3d_p4_mod):
        # 2 r sin(pi/k) >= 10 eps regime: all-chords vs NN within 5%
        k = 6
        eps = consts_ss.eps
        r = 10.0 * eps / (2.0 * math.sin(math.pi / k)) * 1.2
        pot = SS["pot"]
        full = reduced_F1(r, k, "same_sign", consts_ss, pot, exact_pairs=True)
        nn = reduced_F1(r, k, "same_sign", consts_ss, pot, exact_pairs=False)
        assert nn == pytest.approx(full, rel=0.05)

    def test_quadrature_and_model_branches_agree_asymptotically(
        self, consts_ss, profile_3d_p4_mod
    ):
        # at large separation the closed-form pair/tail model tracks the
        # exact quadrature branch
        k, r = 5, 14.0
        pot = SS["pot"]
        model = reduced_F1(r, k, "same_sign", consts_ss, pot)
        quad = reduced_F1(
            r, k, "same_sign", consts_ss, pot, profile=profile_3d_p4_mod,
            quadrature_pairs=True, quadrature_tail=True,
        )
        assert model == pytest.approx(quad, rel=0.05)

    def test_prefactor_invariance_of_argmax(self, consts_ss, profile_3d_p4_mod):
        # scaling the r-dependent part by a positive constant moves F but
        # not the optimizer's argmax: rerun with alpha doubled
        from multibump.params import ReducedConstants

        pot = SS["pot"]
        window = WindowSpec(eps=SS["eps"], m=2.0, mode="same_sign")
        base = optimize_radius(128, "same_sign", window, consts_ss, pot)
        doubled = ReducedConstants(
            alpha=2.0 * consts_ss.alpha, beta=consts_ss.beta, B1=consts_ss.B1,
            eps=consts_ss.eps, N=consts_ss.N, p=consts_ss.p,
        )
        again = optimize_radius(128, "same_sign", window, doubled, pot)
        assert again.r_opt == pytest.approx(base.r_opt, rel=1e-8)


class TestBalanceRadius:
    def test_agrees_with_optimizer(self, consts_ss):
        pot = SS["pot"]
        window = WindowSpec(eps=SS["eps"], m=2.0, mode="same_sign")
        for k in (64, 256):
            opt = optimize_radius(k, "same_sign", window, consts_ss, pot)
            bal = balance_radius(k, consts_ss, pot)
            assert abs(opt.r_opt - bal) / bal < 0.02

    def test_alternating_agrees_with_optimizer(self, consts_alt):
        pot = ALT["pot"]
        window = WindowSpec(eps=ALT["eps"], m=2.0, mode="alternating")
        for k in (64, 256):
            opt = optimize_radius(k, "alternating", window, consts_alt, pot)
            bal = balance_radius(k, consts_alt, pot, "alternating")
            assert abs(opt.r_opt - bal) / bal < 0.02

    def test_ratio_approaches_target(self, consts_ss, consts_alt):
        for consts, pot, mode in (
            (consts_ss, SS["pot"], "same_sign"),
            (consts_alt, ALT["pot"], "alternating"),
        ):
            c = WindowSpec(eps=consts.eps, m=2.0, mode=mode).c
            r64 = balance_radius(64, consts, pot, mode)
            r1024 = balance_radius(1024, consts, pot, mode)
            e64 = abs(r64 / (64 * math.log(64)) - c) / c
            e1024 = abs(r1024 / (1024 * math.log(1024)) - c) / c
            assert e1024 < e64

    def test_decreases_with_tail_strength(self, consts_ss):
        # raising a lifts the algebraic side of the balance equation, so
        # the exponential side must rise too: the root moves inward
        k = 128
        radii = [
            balance_radius(k, consts_ss, PotentialModel(sign=+1, a=a, m=2.0))
            for a in (0.2, 0.4, 0.8)
        ]
        assert radii[0] > radii[1] > radii[2]

    def test_wrong_sign_has_no_root(self, consts_ss):
        # same-sign rings with a repulsive-tail potential cannot balance
        with pytest.raises(NoRootError):
            balance_radius(128, consts_ss, PotentialModel(sign=-1, a=0.4, m=2.0))


class TestScalingTable:
    def test_same_sign_rel_err_decreasing(self, consts_ss):
        rows = scaling_table([64, 128, 256, 512], "same_sign", consts_ss, SS["pot"])
        errs = [row.rel_err for row in rows]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert all(row.boundary_flag == "interior" for row in rows)

    def test_alternating_targets_eps_m_over_pi(self, consts_alt):
        rows = scaling_table([64, 256], "alternating", consts_alt, ALT["pot"])
        assert rows[0].target == pytest.approx(ALT["eps"] * 2.0 / math.pi)
        assert rows[1].rel_err < rows[0].rel_err

    def test_k1_row_flagged(self, consts_ss):
        rows = scaling_table([1, 64], "same_sign", consts_ss, SS["pot"])
        assert rows[0].boundary_flag == "degenerate_k"
        assert math.isnan(rows[0].ratio)
        assert rows[1].boundary_flag == "interior"


class TestWindowSigns:
    @pytest.mark.parametrize("mode", ["same_sign", "alternating"])
    def test_endpoints_straddle_optimum_large_k(self, mode, consts_ss, consts_alt):
        consts = consts_ss if mode == "same_sign" else consts_alt
        pot = SS["pot"] if mode == "same_sign" else ALT["pot"]
        for k in (256, 512):
            ws = window_sign_check(k, None, consts, pot, mode)
            assert ws.lower_negative
            assert ws.upper_below_peak

    def test_small_k_reported_honestly(self, consts_ss):
        ws = window_sign_check(4, None, consts_ss, SS["pot"])
        assert isinstance(ws.lower_negative, bool)


class TestSpecExampleParameters:
    def test_k256_eps_half_interior_optimum(self, profile_3d_p4_mod):
        # eps=0.5, a=1, m=2, theta=0.3c: interior optimum without flag
        B1 = interaction_constant(profile_3d_p4_mod).B1_hat
        consts = reduced_constants(profile_3d_p4_mod, 0.5, B1)
        pot = PotentialModel(sign=+1, a=1.0, m=2.0)
        window = WindowSpec(eps=0.5, m=2.0, mode="same_sign")
        opt = optimize_radius(256, "same_sign", window, consts, pot)
        assert not opt.boundary_hit

    def test_window_theta_validation(self):
        with pytest.raises(ConfigurationError):
            WindowSpec(eps=0.5, m=2.0, mode="same_sign", theta=0.2)  # theta >= c
