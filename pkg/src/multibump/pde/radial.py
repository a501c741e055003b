"""Radial solve of the concentrated central bump u_eps.

Damped Newton on the finite-difference discretization of

    -eps² (u'' + (N-1) u'/s) + V(s) u = |u|^(p-2) u,   u'(0)=0, u(S)=0,

started from the concentration profile (V(0))^(1/(p-2)) U(sqrt(V(0)) s / eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from ..errors import ConfigurationError, NumericalFailureError
from ..ground_state import GroundStateProfile
from ..params import PotentialModel, ProblemParams


@dataclass
class RadialSolution:
    """FD solution of the central-bump problem on [0, S]."""

    s_grid: np.ndarray
    values: np.ndarray
    eps: float
    params: ProblemParams
    potential: PotentialModel
    residual_norm: float
    newton_iterations: int

    _spline: CubicSpline | None = None

    @property
    def S(self) -> float:
        return float(self.s_grid[-1])

    def evaluate(self, s):
        """Interpolated u_eps(s); zero beyond the truncation radius."""
        if self._spline is None:
            object.__setattr__(
                self, "_spline",
                CubicSpline(self.s_grid, self.values,
                            bc_type=((1, 0.0), (1, 0.0))),
            )
        s_arr = np.asarray(s, dtype=float)
        out = np.where(s_arr <= self.S, self._spline(np.minimum(s_arr, self.S)), 0.0)
        return out if out.ndim else float(out)


def _fd_residual(u, s, hs, eps2, V, p, N):
    """Residual of the radial FD system; u includes the origin node,
    Dirichlet closure at s = S."""
    n = u.size
    R = np.empty(n)
    up = np.empty(n)  # u at i+1 with Dirichlet end
    up[:-1] = u[1:]
    up[-1] = 0.0
    um = np.empty(n)
    um[1:] = u[:-1]
    um[0] = u[1] if n > 1 else 0.0  # Neumann ghost: u(-h) = u(h)
    lap = (up - 2.0 * u + um) / hs**2
    drift = np.zeros(n)
    drift[1:] = (N - 1) / s[1:] * (up[1:] - um[1:]) / (2.0 * hs)
    # removable singularity at the origin: Laplacian = N u''(0)
    lap0 = N * 2.0 * (u[1] - u[0]) / hs**2 if n > 1 else 0.0
    R[0] = -eps2 * lap0 + V[0] * u[0] - np.sign(u[0]) * abs(u[0]) ** (p - 1)
    R[1:] = (
        -eps2 * (lap[1:] + drift[1:])
        + V[1:] * u[1:]
        - np.sign(u[1:]) * np.abs(u[1:]) ** (p - 1)
    )
    return R


def _fd_jacobian_banded(u, s, hs, eps2, V, p, N):
    """Tridiagonal Jacobian in solve_banded layout (ab[0]=upper, ab[1]=diag,
    ab[2]=lower)."""
    n = u.size
    ab = np.zeros((3, n))
    ab[1] = 2.0 * eps2 / hs**2 + V - (p - 1.0) * np.abs(u) ** (p - 2.0)
    # generic rows
    coeff_up = -eps2 * (1.0 / hs**2)
    ab[0, 2:] = coeff_up - eps2 * (N - 1) / s[1:-1] / (2.0 * hs)
    ab[2, :-2] = coeff_up + eps2 * (N - 1) / s[1:-1] / (2.0 * hs)
    # origin row: -eps2 N (2 u1 - 2 u0)/hs² -> diag 2 N eps2/hs², upper -2 N eps2/hs²
    ab[1, 0] = 2.0 * N * eps2 / hs**2 + V[0] - (p - 1.0) * abs(u[0]) ** (p - 2.0)
    ab[0, 1] = -2.0 * N * eps2 / hs**2
    # last interior row couples to the Dirichlet boundary only
    ab[2, -2] = coeff_up + eps2 * (N - 1) / s[-1] / (2.0 * hs) if n > 1 else 0.0
    return ab


def solve_concentrated_radial(potential: PotentialModel, eps: float,
                              params: ProblemParams,
                              profile: GroundStateProfile,
                              tol: float = 1e-10,
                              S: float | None = None,
                              n: int | None = None,
                              max_iter: int = 60) -> RadialSolution:
    """Newton solve for the radial central bump.

    The initial guess is the scaled ground state
    (V(0))^(1/(p-2)) U(sqrt(V(0)) s/eps); convergence means the discrete
    residual (sup norm relative to the amplitude) falls below tol.
    """
    V0 = float(potential(0.0))
    if V0 <= 0:
        raise ConfigurationError("potential must be positive at the origin")
    N, p = params.N, params.p
    if S is None:
        S = 40.0 * eps / math.sqrt(V0) + 2.0
    if n is None:
        n = int(round(S / (eps / 60.0)))
    # unknowns at s_i = i hs for i = 0..n (origin plus interiors);
    # the Dirichlet boundary node sits at s = S = (n+1) hs
    hs = S / (n + 1)
    s = hs * np.arange(n + 1)
    V = potential(s)
    eps2 = eps * eps

    amp = V0 ** (1.0 / (p - 2.0))
    u = amp * profile.evaluate(math.sqrt(V0) * s / eps)
    scale = abs(amp)

    Rn = _fd_residual(u, s, hs, eps2, V, p, N)
    norm = float(np.max(np.abs(Rn)))
    for it in range(max_iter):
        if norm <= tol * scale:
            break
        ab = _fd_jacobian_banded(u, s, hs, eps2, V, p, N)
        delta = solve_banded((1, 1), ab, -Rn)
        lam = 1.0
        while lam >= 2.0**-24:
            trial = u + lam * delta
            Rt = _fd_residual(trial, s, hs, eps2, V, p, N)
            nt = float(np.max(np.abs(Rt)))
            if nt <= (1.0 - 1e-4 * lam) * norm or nt <= tol * scale:
                u, Rn, norm = trial, Rt, nt
                break
            lam *= 0.5
        else:
            raise NumericalFailureError(
                f"radial Newton stalled at residual {norm:.3e} "
                f"(iteration {it}, damping exhausted)"
            )
    else:
        raise NumericalFailureError(
            f"radial Newton did not reach tol {tol:g} in {max_iter} iterations "
            f"(residual {norm:.3e})"
        )
    if np.min(u) < -tol * scale:
        raise NumericalFailureError("radial solve lost positivity")
    return RadialSolution(
        s_grid=s, values=u, eps=eps, params=params, potential=potential,
        residual_norm=norm, newton_iterations=it,
    )
