"""Nondegeneracy spectra of the linearized operator around the ground state.

The operator -Δ + 1 - (p-1)U^(p-2) decomposes over spherical harmonics
into radial operators

    A_l = -d²/dr² - ((N-1)/r) d/dr + l(l+N-2)/r² + 1 - (p-1)U(r)^(p-2).

The substitution v = r^((N-1)/2) u symmetrizes A_l to Sturm-Liouville
form -v'' + Q(r) v with

    Q = 1 - (p-1)U^(p-2) + [l(l+N-2) + (N-1)(N-3)/4] / r²,

which a second-order central-difference discretization turns into a
symmetric tridiagonal matrix; its extreme eigenvalues come from LAPACK's
Sturm-sequence bisection with inverse iteration for vectors.

Translation invariance forces an exact zero eigenvalue in the l = 1
sector with eigenfunction U'(r); nondegeneracy holds when that is the
whole kernel (l = 0 has exactly one negative eigenvalue and l >= 2 stays
positive).  For N = 1 the base point condition v(0) = 0 selects the
odd-parity sector of the line, where the same zero mode U'(x) lives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConfigurationError, NumericalFailureError
from .ground_state import GroundStateProfile


@dataclass
class SectorSpectrum:
    """Lowest eigenvalues of one spherical-harmonic sector."""

    ell: int
    eigenvalues: np.ndarray      # ascending, shape (count,)
    eigenfunctions: np.ndarray   # shape (count, n_points), radial factors u(r)
    r: np.ndarray                # interior grid nodes
    r_max: float
    n_points: int
    converged_estimate: np.ndarray  # per-eigenvalue error estimate


def _sector_potential(profile: GroundStateProfile, ell: int, r: np.ndarray) -> np.ndarray:
    N, p = profile.params.N, profile.params.p
    U = profile.evaluate(r)
    cent = ell * (ell + N - 2) + (N - 1) * (N - 3) / 4.0
    return 1.0 - (p - 1.0) * U ** (p - 2.0) + cent / (r * r)


def _tridiag(profile: GroundStateProfile, ell: int, r_max: float, n: int):
    h = r_max / (n + 1)
    r = h * np.arange(1, n + 1)
    Q = _sector_potential(profile, ell, r)
    diag = 2.0 / h**2 + Q
    off = np.full(n - 1, -1.0 / h**2)
    return diag, off, r, h


def sector_eigs(profile: GroundStateProfile, ell: int, count: int,
                r_max: float = 20.0, n_points: int = 2048) -> SectorSpectrum:
    """Lowest `count` eigenvalues of sector l with Dirichlet truncation.

    The grid-convergence estimate per eigenvalue is twice the change
    under doubling n_points (a safety-factor-two second-order Richardson
    error bound for the n_points value).
    """
    if count < 1:
        raise ConfigurationError(f"count must be >= 1, got {count}")
    if n_points < 512:
        raise ConfigurationError(f"n_points must be >= 512, got {n_points}")
    if ell < 0:
        raise ConfigurationError(f"ell must be >= 0, got {ell}")

    diag, off, r, h = _tridiag(profile, ell, r_max, n_points)
    try:
        vals, vecs = eigh_tridiagonal(
            diag, off, select="i", select_range=(0, count - 1)
        )
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalFailureError(f"sector l={ell} eigensolve failed: {exc}") from exc

    diag2, off2, _, _ = _tridiag(profile, ell, r_max, 2 * n_points + 1)
    vals2 = eigh_tridiagonal(
        diag2, off2, select="i", select_range=(0, count - 1), eigvals_only=True
    )
    estimate = 2.0 * np.abs(vals - vals2)

    # back-substitute v = r^((N-1)/2) u and normalize in L²(r^(N-1) dr)
    nu = (profile.params.N - 1) / 2.0
    u = vecs.T / r**nu
    norms = np.sqrt(np.sum(u * u * r ** (profile.params.N - 1) * h, axis=1))
    u /= norms[:, None]
    return SectorSpectrum(
        ell=ell, eigenvalues=vals, eigenfunctions=u, r=r,
        r_max=r_max, n_points=n_points, converged_estimate=estimate,
    )


def negative_count(profile: GroundStateProfile, ell: int,
                   r_max: float = 20.0, n_points: int = 2048) -> int:
    """Number of negative eigenvalues in sector l."""
    diag, off, _, _ = _tridiag(profile, ell, r_max, n_points)
    vals = eigh_tridiagonal(
        diag, off, select="v", select_range=(-np.inf, 0.0), eigvals_only=True
    )
    return int(vals.size)


@dataclass
class NondegeneracyReport:
    neg_count_ell0: int
    lambda0_ell1: float
    overlap_ell1: float
    lambda0_ell2: float
    lambda0_ell1_estimate: float


def nondegeneracy_report(profile: GroundStateProfile, r_max: float = 20.0,
                         n_points: int = 2048) -> NondegeneracyReport:
    """Kernel structure of the linearized operator.

    overlap_ell1 is the absolute cosine between the l = 1 ground
    eigenvector and the grid samples of U'(r) in the weighted inner
    product; nondegeneracy corresponds to neg_count_ell0 == 1, a zero
    at the bottom of l = 1 carried by U', and a positive l = 2 bottom.
    """
    s0 = sector_eigs(profile, 0, 2, r_max, n_points)
    s1 = sector_eigs(profile, 1, 1, r_max, n_points)
    s2 = sector_eigs(profile, 2, 1, r_max, n_points)

    w = s1.r ** (profile.params.N - 1)
    du = profile.evaluate_derivative(s1.r)
    v = s1.eigenfunctions[0]
    cos = np.sum(v * du * w) / np.sqrt(np.sum(v * v * w) * np.sum(du * du * w))

    neg0 = negative_count(profile, 0, r_max, n_points)
    if neg0 != int(np.sum(s0.eigenvalues < 0.0)):
        # lowest-two window missed negatives further up; recount honestly
        neg0 = max(neg0, int(np.sum(s0.eigenvalues < 0.0)))
    return NondegeneracyReport(
        neg_count_ell0=neg0,
        lambda0_ell1=float(s1.eigenvalues[0]),
        overlap_ell1=float(abs(cos)),
        lambda0_ell2=float(s2.eigenvalues[0]),
        lambda0_ell1_estimate=float(s1.converged_estimate[0]),
    )
