"""Damped inexact Newton with matrix-free MINRES linear solves.

The Jacobian -eps²Δ + V - (p-1)|u|^(p-2) is symmetric but possibly
indefinite, so the inner solver is MINRES with the positive diagonal
-eps²Δ-part + V as Jacobi preconditioner.  The inner tolerance follows
an Eisenstat-Walker style schedule between 1e-1 and 1e-4, and steps are
accepted under an Armijo decrease of the residual norm.  The reflection
symmetries are enforced structurally by the half/quarter-domain storage,
which also excludes the near-kernel rotation and transverse-translation
modes of ring configurations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator, minres

from ..errors import NumericalFailureError
from ..params import PotentialModel, ProblemParams
from .grid import Field
from .operators import PDEOperator

FORCING_MAX = 0.1
FORCING_MIN = 1e-6
DAMPING_FLOOR = 2.0**-16


@dataclass
class NewtonReport:
    iterations: int
    residual_history: list[float]
    correction_norm: float
    converged: bool
    krylov_stats: list[int] = field(default_factory=list)


def newton_refine(fld: Field, potential: PotentialModel, eps: float,
                  params: ProblemParams, tol: float = 1e-8,
                  max_iter: int = 30) -> tuple[Field, NewtonReport]:
    """Refine a field to a discrete PDE solution; returns (field, report).

    converged means the discrete L² residual fell below tol.  A damping
    floor or NaN produces a converged=False report with the history
    rather than an exception; NaN aborts immediately.
    """
    grid = fld.grid
    grid.check_resolution(eps)
    op = PDEOperator(grid, potential, eps, params)
    shape = grid.stored_shape
    size = int(np.prod(shape))

    u0 = fld.values.copy()
    u = fld.values.copy()
    R = op.residual(u)
    rnorm = op.norm(R)
    history = [rnorm]
    krylov = []
    precond_diag = 6.0 * eps**2 / grid.h**2 + op.V

    converged = rnorm <= tol
    it = 0
    prev_forcing = 1e-2
    while not converged and it < max_iter:
        it += 1
        coeff = op.V - (params.p - 1.0) * np.abs(u) ** (params.p - 2.0)

        counter = {"n": 0}
        work = np.empty(shape)

        def matvec(w_flat):
            counter["n"] += 1
            w = w_flat.reshape(shape)
            out = _lap(grid, w, out=work)
            out *= -eps**2
            out += coeff * w
            return out.ravel().copy()

        def psolve(w_flat):
            return (w_flat.reshape(shape) / precond_diag).ravel()

        A = LinearOperator((size, size), matvec=matvec, dtype=float)
        M = LinearOperator((size, size), matvec=psolve, dtype=float)

        if len(history) >= 2:
            ratio = history[-1] / history[-2]
            forcing = min(FORCING_MAX, max(FORCING_MIN, 0.9 * ratio**1.5))
            if ratio > 0.7:
                # stalling: the residual lives in near-null directions that
                # loose inner solves cannot resolve; tighten hard
                forcing = max(FORCING_MIN, 0.05 * prev_forcing)
        else:
            forcing = 1e-2
        prev_forcing = forcing
        delta_flat = _inner_solve(A, M, -R.ravel(), forcing,
                                  anorm_est=float(
                                      12.0 * eps**2 / grid.h**2 + np.max(np.abs(coeff))
                                  ))
        krylov.append(counter["n"])
        delta = delta_flat.reshape(shape)

        lam = 1.0
        accepted = False
        while lam >= DAMPING_FLOOR:
            trial = u + lam * delta
            Rt = op.residual(trial)
            nt = op.norm(Rt)
            if np.isnan(nt):
                raise NumericalFailureError(
                    f"NaN residual during Newton step {it} (lambda={lam:g})"
                )
            if nt <= (1.0 - 1e-4 * lam) * rnorm:
                u, R, rnorm = trial, Rt, nt
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
        history.append(rnorm)
        converged = rnorm <= tol

    correction = op.h1_norm(u - u0)
    report = NewtonReport(
        iterations=it,
        residual_history=history,
        correction_norm=correction,
        converged=bool(converged),
        krylov_stats=krylov,
    )
    return Field(grid, u), report


def _lap(grid, w, out=None):
    from .operators import laplacian_apply

    return laplacian_apply(grid, w, out=out)


def _inner_solve(A, M, b, forcing, anorm_est):
    """MINRES solve of A x = b to a true relative residual <= forcing.

    scipy's MINRES stops on the Paige-Saunders estimate, which loosens by
    roughly the operator norm for stiff operators; the requested rtol is
    compensated accordingly and the true residual is verified (with up to
    three progressively tighter retries, warm-started).
    """
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b)
    rtol = forcing / max(1.0, anorm_est)
    x = None
    for _ in range(4):
        x, _ = minres(A, b, x0=x, M=M, rtol=rtol, maxiter=min(4000, b.size))
        true_rel = np.linalg.norm(A.matvec(x) - b) / bnorm
        if true_rel <= forcing:
            break
        rtol *= 0.02
    return x
