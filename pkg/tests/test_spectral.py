"""Sector-spectrum tests: zero mode, Sturm-count oracle, grid convergence."""

import numpy as np
import pytest

from multibump.errors import ConfigurationError
from multibump.spectral import (
    _tridiag,
    negative_count,
    nondegeneracy_report,
    sector_eigs,
)


def sturm_count_below(diag, off, x):
    """Independent oracle: number of eigenvalues of the symmetric
    tridiagonal (diag, off) strictly below x, by the classic Sturm/LDL^T
    sign count."""
    count = 0
    d = diag[0] - x
    if d < 0:
        count += 1
    for i in range(1, diag.size):
        d = (diag[i] - x) - off[i - 1] ** 2 / d
        if d < 0:
            count += 1
    return count


class TestZeroMode:
    def test_ell1_bottom_is_zero_mode(self, profile_3d_p4):
        s = sector_eigs(profile_3d_p4, 1, 1, 20.0, 2048)
        assert abs(s.eigenvalues[0]) < 1e-3
        assert abs(s.eigenvalues[0]) <= s.converged_estimate[0]

    def test_ell1_eigenvector_overlaps_derivative(self, profile_3d_p4):
        rep = nondegeneracy_report(profile_3d_p4, 20.0, 2048)
        assert rep.overlap_ell1 > 0.999

    def test_zero_mode_residual_is_second_order(self, profile_3d_p4):
        # applying the discrete l=1 operator to samples of U' gives a
        # residual that shrinks ~4x under grid halving
        norms = {}
        for n in (1024, 2049):
            diag, off, r, h = _tridiag(profile_3d_p4, 1, 20.0, n)
            v = r * profile_3d_p4.evaluate_derivative(r)  # symmetrized variable
            Tv = diag * v
            Tv[:-1] += off * v[1:]
            Tv[1:] += off * v[:-1]
            norms[n] = np.sqrt(np.sum(Tv * Tv) * h) / np.sqrt(np.sum(v * v) * h)
        ratio = norms[1024] / norms[2049]
        assert 2.5 < ratio < 6.0

    def test_1d_odd_sector_zero_mode(self, profile_1d_p4):
        # for N=1 the Dirichlet base point selects the odd sector, where
        # the translation mode U'(x) = -sqrt(2) sech tanh is the kernel
        s = sector_eigs(profile_1d_p4, 1, 1, 20.0, 2048)
        assert abs(s.eigenvalues[0]) < 1e-3
        x = s.r
        exact = -np.sqrt(2.0) / np.cosh(x) * np.tanh(x)
        v = s.eigenfunctions[0]
        cos = np.sum(v * exact) / np.sqrt(np.sum(v * v) * np.sum(exact * exact))
        assert abs(cos) > 0.9999


class TestMorseStructure:
    def test_ell0_exactly_one_negative(self, profile_3d_p4):
        assert negative_count(profile_3d_p4, 0, 20.0, 2048) == 1

    def test_ell0_against_sturm_oracle(self, profile_3d_p4):
        diag, off, _, _ = _tridiag(profile_3d_p4, 0, 20.0, 2048)
        assert sturm_count_below(diag, off, 0.0) == 1

    def test_ell0_second_eigenvalue_nonnegative(self, profile_3d_p4):
        s = sector_eigs(profile_3d_p4, 0, 2, 20.0, 2048)
        assert s.eigenvalues[0] < 0.0
        assert s.eigenvalues[1] >= 0.0

    def test_ell2_bottom_positive(self, profile_3d_p4):
        s = sector_eigs(profile_3d_p4, 2, 1, 20.0, 2048)
        assert s.eigenvalues[0] > 0.0

    def test_higher_sectors_match_sturm_oracle(self, profile_3d_p4):
        for ell in (1, 2):
            diag, off, _, _ = _tridiag(profile_3d_p4, ell, 20.0, 1024)
            oracle = sturm_count_below(diag, off, 0.5)
            s = sector_eigs(profile_3d_p4, ell, 3, 20.0, 1024)
            assert int(np.sum(s.eigenvalues < 0.5)) == min(oracle, 3)


class TestSpectralStructure:
    def test_eigenvalues_ascend(self, profile_3d_p4):
        s = sector_eigs(profile_3d_p4, 0, 3, 20.0, 1024)
        assert np.all(np.diff(s.eigenvalues) > 0.0)

    def test_centrifugal_monotonicity(self, profile_3d_p4):
        # eigenvalues increase with l at fixed index
        bottoms = [
            sector_eigs(profile_3d_p4, ell, 2, 20.0, 1024).eigenvalues
            for ell in range(4)
        ]
        for lower, higher in zip(bottoms, bottoms[1:]):
            assert higher[0] > lower[0]
            assert higher[1] > lower[1]

    def test_richardson_ratio_second_order(self, profile_3d_p4):
        # lambda errors shrink ~4x per halving; compare three resolutions
        vals = {}
        for n in (1024, 2049, 4099):
            s = sector_eigs(profile_3d_p4, 2, 1, 20.0, n)
            vals[n] = s.eigenvalues[0]
        d1 = abs(vals[1024] - vals[2049])
        d2 = abs(vals[2049] - vals[4099])
        assert 2.5 < d1 / d2 < 6.0

    def test_eigenfunction_normalization(self, profile_3d_p4):
        s = sector_eigs(profile_3d_p4, 1, 1, 20.0, 1024)
        h = 20.0 / 1025
        w = s.r ** 2
        assert np.sum(s.eigenfunctions[0] ** 2 * w * h) == pytest.approx(1.0)


class TestValidation:
    def test_count_positive(self, profile_3d_p4):
        with pytest.raises(ConfigurationError):
            sector_eigs(profile_3d_p4, 0, 0, 20.0, 1024)

    def test_n_points_minimum(self, profile_3d_p4):
        with pytest.raises(ConfigurationError):
            sector_eigs(profile_3d_p4, 0, 1, 20.0, 256)
