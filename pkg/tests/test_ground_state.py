"""Ground-state solver tests against closed forms and frozen oracles.

Frozen oracle values (computed before the build, independent methods):
  * U(0) for N=3, p=4: 4.337387679257 from a fixed-step classical RK4
    bisection (h = 5e-4, Richardson-consistent at h = 1e-3 and 2e-3).
  * decay constant for N=3, p=4: 2.712808357 from a staged solve at
    r_max = 30 averaged over [18, 24].
"""

import math

import numpy as np
import pytest

from multibump.errors import (
    ConfigurationError,
    InsufficientResolutionError,
)
from multibump.ground_state import (
    GroundStateProfile,
    Moments,
    decay_constant,
    moments,
    ode_defect,
    read_profile,
    solve_ground_state,
    write_profile,
)
from multibump.params import ProblemParams

ORACLE_U0_3D_P4 = 4.337387679257
ORACLE_C_3D_P4 = 2.712808357


def soliton_1d(p, x):
    """Closed form (p/2)^(1/(p-2)) sech^(2/(p-2))((p-2) x / 2)."""
    return (p / 2.0) ** (1.0 / (p - 2.0)) * np.cosh((p - 2.0) * x / 2.0) ** (
        -2.0 / (p - 2.0)
    )


class TestClosedForms1D:
    def test_p3_center_amplitude(self, profile_1d_p3):
        assert profile_1d_p3.U0 == pytest.approx(1.5, abs=1e-10)

    def test_p4_center_amplitude(self, profile_1d_p4):
        assert profile_1d_p4.U0 == pytest.approx(math.sqrt(2.0), abs=1e-10)

    @pytest.mark.parametrize("p", [3.0, 4.0])
    def test_sup_norm_against_soliton(self, p, profile_1d_p3, profile_1d_p4):
        prof = profile_1d_p3 if p == 3.0 else profile_1d_p4
        x = np.linspace(0.0, 10.0, 1001)
        exact = soliton_1d(p, x)
        rel = np.max(np.abs(prof.evaluate(x) - exact) / exact)
        assert rel < 1e-6

    def test_p4_point_value(self, profile_1d_p4):
        assert profile_1d_p4.evaluate(2.0) == pytest.approx(
            math.sqrt(2.0) / math.cosh(2.0), rel=1e-8
        )

    def test_p4_decay_constant_is_2root2(self, profile_1d_p4):
        C, variation = decay_constant(profile_1d_p4)
        assert C == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-6)
        assert variation < 1e-4

    def test_p4_moments_closed_form(self, profile_1d_p4):
        m = profile_1d_p4.moments
        assert m.I2 == pytest.approx(4.0, rel=1e-8)
        assert m.Ip == pytest.approx(16.0 / 3.0, rel=1e-8)
        assert m.Igrad == pytest.approx(4.0 / 3.0, rel=1e-8)


class Test3D:
    def test_center_amplitude_against_oracle(self, profile_3d_p4):
        assert profile_3d_p4.U0 == pytest.approx(ORACLE_U0_3D_P4, rel=1e-9)

    def test_decay_constant_against_oracle(self, profile_3d_p4):
        C, variation = decay_constant(profile_3d_p4)
        assert C == pytest.approx(ORACLE_C_3D_P4, rel=1e-7)
        assert variation < 1e-2

    def test_decay_plateau_under_one_percent(self, profile_3d_p4):
        grid = profile_3d_p4.r_grid
        m = (grid >= 12.0) & (grid <= 16.0)
        g = profile_3d_p4.U_values[m] * np.exp(grid[m]) * grid[m]
        assert (g.max() - g.min()) / g.mean() < 0.01

    def test_pohozaev_identity(self, profile_3d_p4):
        m = profile_3d_p4.moments
        assert m.Igrad + m.I2 == pytest.approx(m.Ip, rel=1e-6)

    def test_ode_defect_within_contract(self, profile_3d_p4):
        assert ode_defect(profile_3d_p4) <= profile_3d_p4.tol * profile_3d_p4.U0


class TestProfileShape:
    def test_strictly_decreasing_and_positive(self, profile_3d_p4):
        U = profile_3d_p4.U_values
        assert np.all(U > 0.0)
        assert np.all(np.diff(U) < 0.0)

    def test_derivative_negative_away_from_origin(self, profile_3d_p4):
        dU = profile_3d_p4.dU_values
        assert dU[0] == 0.0
        assert np.all(dU[1:] < 0.0)

    def test_tail_seam_continuity(self, profile_3d_p4):
        prof = profile_3d_p4
        below = prof.evaluate(np.nextafter(prof.r_max, 0.0))
        above = prof.evaluate(np.nextafter(prof.r_max, np.inf))
        assert abs(below - above) / above < 10.0 * prof.tol
        # and across the splice seam between spline and formula regions
        below = prof.evaluate(np.nextafter(prof.splice_r, 0.0))
        above = prof.evaluate(np.nextafter(prof.splice_r, np.inf))
        assert abs(below - above) / above < 10.0 * prof.tol

    def test_tail_formula_beyond_rmax(self, profile_3d_p4):
        prof = profile_3d_p4
        s = prof.r_max + 5.0
        expected = prof.decay_C * math.exp(-s) / s
        assert prof.evaluate(s) == pytest.approx(expected, rel=1e-6)


class TestEvaluateScaled:
    def test_eps_one_is_identity(self, profile_3d_p4, rng):
        d = rng.uniform(0.0, 15.0, size=20)
        assert np.allclose(
            profile_3d_p4.evaluate_scaled(1.0, d), profile_3d_p4.evaluate(d)
        )

    def test_scaling_definition(self, profile_3d_p4, rng):
        for _ in range(10):
            eps = rng.uniform(0.2, 2.0)
            d = rng.uniform(0.0, 10.0)
            assert profile_3d_p4.evaluate_scaled(eps, d) == profile_3d_p4.evaluate(
                d / eps
            )

    def test_center_value(self, profile_3d_p4):
        assert profile_3d_p4.evaluate_scaled(2.0, 0.0) == profile_3d_p4.U0


class TestValidation:
    def test_rmax_too_small(self):
        with pytest.raises(ConfigurationError):
            solve_ground_state(3, 4.0, r_max=8.0)

    def test_tol_out_of_range(self):
        with pytest.raises(ConfigurationError):
            solve_ground_state(3, 4.0, tol=1e-3)

    def test_supercritical_exponent_rejected(self):
        with pytest.raises(ConfigurationError):
            solve_ground_state(3, 6.5)

    def test_decay_window_needs_rmax(self, profile_3d_p4):
        # a synthetic short-range profile violates the window precondition
        short = GroundStateProfile(
            params=ProblemParams(3, 4.0),
            r_grid=profile_3d_p4.r_grid[:801],
            U_values=profile_3d_p4.U_values[:801],
            dU_values=profile_3d_p4.dU_values[:801],
            r_max=8.0,
            tol=1e-10,
            decay_C=1.0,
            decay_variation=0.0,
            moments=Moments(1.0, 1.0, 1.0),
            splice_r=8.0,
        )
        with pytest.raises(InsufficientResolutionError):
            decay_constant(short)


class TestCacheRoundTrip:
    def test_write_read_bit_identical(self, profile_3d_p4, tmp_path):
        path = tmp_path / "prof.csv"
        write_profile(path, profile_3d_p4)
        back = read_profile(path)
        assert np.array_equal(back.r_grid, profile_3d_p4.r_grid)
        assert np.array_equal(back.U_values, profile_3d_p4.U_values)
        assert np.array_equal(back.dU_values, profile_3d_p4.dU_values)
        assert back.decay_C == profile_3d_p4.decay_C

    def test_reloaded_results_match(self, profile_3d_p4, tmp_path):
        path = tmp_path / "prof.csv"
        write_profile(path, profile_3d_p4)
        back = read_profile(path)
        assert back.moments.I2 == pytest.approx(profile_3d_p4.moments.I2, rel=1e-12)
        assert back.moments.Ip == pytest.approx(profile_3d_p4.moments.Ip, rel=1e-12)
        s = np.linspace(0.0, 25.0, 500)
        assert np.allclose(back.evaluate(s), profile_3d_p4.evaluate(s), rtol=1e-12)

    def test_header_format(self, profile_3d_p4, tmp_path):
        path = tmp_path / "prof.csv"
        write_profile(path, profile_3d_p4)
        head = path.read_text().splitlines()[0]
        assert head.startswith("# multibump-profile v1 N=3 p=4.0 rmax=20.0 tol=1e-10 C=")


def test_moments_identity_other_exponent():
    prof = solve_ground_state(3, 3.0)
    m = prof.moments
    assert m.Igrad + m.I2 == pytest.approx(m.Ip, rel=1e-6)
