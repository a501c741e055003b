"""Peak extraction and Jacobian edge eigenvalues of refined fields."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, minres

from ..errors import ConfigurationError
from ..params import PotentialModel, ProblemParams
from .grid import Field
from .operators import PDEOperator


@dataclass
class Peak:
    position: np.ndarray
    value: float
    sign: int


@dataclass
class PeakSet:
    peaks: list[Peak]

    @property
    def positive(self) -> list[Peak]:
        return [p for p in self.peaks if p.sign > 0]

    @property
    def negative(self) -> list[Peak]:
        return [p for p in self.peaks if p.sign < 0]


def extract_peaks(fld: Field, threshold_frac: float = 0.2) -> PeakSet:
    """Local extrema over 3x3x3 neighborhoods of the unfolded box with
    |value| >= threshold_frac * max|field|.

    Extrema centered on a symmetry plane straddle it as 2 or 4 nodes of
    equal value, so hits are taken as >= their neighborhood and adjacent
    hits are merged into one peak at their value-weighted centroid (which
    restores the on-plane position exactly).
    """
    from scipy.ndimage import label

    if not 0.0 < threshold_frac < 1.0:
        raise ConfigurationError("threshold_frac must lie in (0, 1)")
    full = fld.unfold()
    x = fld.grid.axis_full()
    vmax = float(np.max(np.abs(full)))
    peaks = []
    for sign, arr in ((+1, full), (-1, -full)):
        neighbor_max = maximum_filter(arr, size=3, mode="constant", cval=-np.inf)
        mask = (arr >= neighbor_max) & (arr >= threshold_frac * vmax)
        labels, n_clusters = label(mask, structure=np.ones((3, 3, 3), dtype=int))
        for c in range(1, n_clusters + 1):
            idx = np.argwhere(labels == c)
            vals = arr[idx[:, 0], idx[:, 1], idx[:, 2]]
            weights = vals / vals.sum()
            centroid = (x[idx] * weights[:, None]).sum(axis=0)
            peaks.append(Peak(
                position=centroid,
                value=float(sign * vals.max()),
                sign=sign,
            ))
    peaks.sort(key=lambda p: (-abs(p.value), tuple(p.position)))
    return PeakSet(peaks)


@dataclass
class EdgeSpectrum:
    eigenvalues: np.ndarray
    converged: bool


def hessian_edge_eigs(fld: Field, potential: PotentialModel, eps: float,
                      params: ProblemParams, count: int = 3,
                      inner_rtol: float = 1e-7) -> EdgeSpectrum:
    """Smallest-magnitude eigenvalues of the discrete Jacobian restricted
    to the stored symmetric subspace, by shift-invert Lanczos around zero
    with matrix-free MINRES inner solves.

    Eigensolver stagnation returns the partial results with
    converged=False instead of raising.
    """
    grid = fld.grid
    op = PDEOperator(grid, potential, eps, params)
    shape = grid.stored_shape
    size = int(np.prod(shape))
    u = fld.values
    coeff = op.V - (params.p - 1.0) * np.abs(u) ** (params.p - 2.0)
    precond_diag = 6.0 * eps**2 / grid.h**2 + op.V

    def matvec(w_flat):
        w = w_flat.reshape(shape)
        from .operators import laplacian_apply

        return (-eps**2 * laplacian_apply(grid, w) + coeff * w).ravel()

    def psolve(w_flat):
        return (w_flat.reshape(shape) / precond_diag).ravel()

    A = LinearOperator((size, size), matvec=matvec, dtype=float)
    M = LinearOperator((size, size), matvec=psolve, dtype=float)

    def opinv(b):
        x, _ = minres(A, b, M=M, rtol=inner_rtol, maxiter=size)
        return x

    OPinv = LinearOperator((size, size), matvec=opinv, dtype=float)
    try:
        vals = eigsh(
            A, k=count, sigma=0.0, which="LM", OPinv=OPinv,
            return_eigenvectors=False, tol=1e-6, maxiter=200,
        )
        ok = True
    except ArpackNoConvergence as exc:
        vals = np.asarray(exc.eigenvalues, dtype=float)
        ok = False
    order = np.argsort(vals)
    return EdgeSpectrum(eigenvalues=np.asarray(vals)[order], converged=ok)
