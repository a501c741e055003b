"""Radial ground state of -ΔU + U = U^(p-1) on R^N by staged shooting.

The solver bisects on the center amplitude U(0), classifying each
trajectory as overshooting (U crosses zero) or undershooting (U' turns
up while 0 < U < 1).  A single double-precision bisection only tracks
the decaying branch to r ≈ 14 before the unstable mode (growing like
e^r) swamps it, so the trajectory is re-anchored every ANCHOR_STEP
units: at each anchor a fresh bisection over a multiplicative amplitude
correction puts the state back on the stable manifold.  This keeps the
tabulated tail clean through r_max and makes the decay plateau of
U(r) e^r r^((N-1)/2) flat to ~1e-9.

Beyond the last reliable radius the stored values are replaced by the
asymptotic tail C e^(-r) r^(-(N-1)/2), which also makes evaluation
continuous across r_max by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import DOP853, solve_ivp
from scipy.interpolate import CubicSpline
from scipy.special import gamma as gamma_fn

from .errors import (
    ConfigurationError,
    InsufficientResolutionError,
    NumericalFailureError,
    UnsolvableParametersError,
)
from .params import ProblemParams

GRID_SPACING = 0.01
ANCHOR_STEP = 8.0
CLASSIFY_RTOL = 1e-13
MAX_BISECT = 200
# rtol floor accepted by scipy's RK steppers (100 * machine eps)
TABULATE_RTOL = 100.0 * np.finfo(float).eps
DECAY_WINDOW = (0.6, 0.8)  # decay-constant fit window, as fractions of r_max
MIN_WINDOW_POINTS = 16


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere S^(N-1); equals 2 for N = 1."""
    return 2.0 * math.pi ** (N / 2.0) / gamma_fn(N / 2.0)


def _tail_series(N: int, r):
    """Algebraic correction series of the far-field decay law.

    U ~ C e^(-r) r^(-(N-1)/2) (1 + a1/r + a2/r^2): the Bessel-type
    corrections, which vanish identically for N = 1 and N = 3.
    Returns (S, S') with S the bracketed series.
    """
    a1 = (N - 1) * (N - 3) / 8.0
    a2 = (N - 1) * (N - 3) * (N + 1) * (N - 5) / 128.0
    S = 1.0 + a1 / r + a2 / r**2
    Sp = -a1 / r**2 - 2.0 * a2 / r**3
    return S, Sp


@dataclass
class Moments:
    I2: float
    Ip: float
    Igrad: float


@dataclass
class GroundStateProfile:
    """Tabulated ground state with derivative, decay constant, and moments.

    decay_C is the plateau-window estimate of the decay constant; the
    stored tail itself is anchored to the raw value at splice_r (tail_C),
    which agrees with decay_C to within decay_variation and keeps the
    profile continuous and ODE-consistent across the splice.
    """

    params: ProblemParams
    r_grid: np.ndarray
    U_values: np.ndarray
    dU_values: np.ndarray
    r_max: float
    tol: float
    decay_C: float
    decay_variation: float
    moments: Moments
    splice_r: float
    tail_C: float = 0.0

    _spline: CubicSpline | None = field(default=None, repr=False, compare=False)
    _dspline: CubicSpline | None = field(default=None, repr=False, compare=False)

    @property
    def U0(self) -> float:
        return float(self.U_values[0])

    def _splines(self):
        if self._spline is None:
            self._spline = CubicSpline(
                self.r_grid, self.U_values,
                bc_type=((1, 0.0), (1, float(self.dU_values[-1]))),
            )
            self._dspline = CubicSpline(self.r_grid, self.dU_values)
        return self._spline, self._dspline

    def tail(self, s):
        """Asymptotic form C e^(-s) s^(-(N-1)/2) (1 + O(1/s)), anchored
        at splice_r so the stored grid and the formula agree exactly."""
        s = np.asarray(s, dtype=float)
        N = self.params.N
        C = self.tail_C or self.decay_C
        S, _ = _tail_series(N, s)
        return C * np.exp(-s) * s ** (-(N - 1) / 2.0) * S

    def evaluate(self, s):
        """U at radius s >= 0: cubic interpolation on the grid, asymptotic
        tail beyond r_max.  Accepts scalars or arrays.

        The stored values beyond splice_r are exactly the tail formula,
        so the formula is evaluated directly there: it agrees with the
        grid knots and avoids the spline's absolute rounding floor, which
        would otherwise dominate the tiny tail amplitudes.
        """
        s_arr = np.asarray(s, dtype=float)
        if np.any(s_arr < 0):
            raise ConfigurationError("evaluate requires s >= 0")
        spline, _ = self._splines()
        inside = s_arr < self.splice_r
        out = np.empty_like(s_arr)
        if inside.any():
            out[inside] = spline(s_arr[inside])
        if (~inside).any():
            out[~inside] = self.tail(s_arr[~inside])
        return out if out.ndim else float(out)

    def evaluate_scaled(self, eps: float, d):
        """U(d / eps), the profile concentrated at scale eps."""
        if eps <= 0:
            raise ConfigurationError("eps must be positive")
        return self.evaluate(np.asarray(d, dtype=float) / eps)

    def evaluate_derivative(self, s):
        s_arr = np.asarray(s, dtype=float)
        _, dspline = self._splines()
        inside = s_arr < self.splice_r
        out = np.empty_like(s_arr)
        if inside.any():
            out[inside] = dspline(s_arr[inside])
        if (~inside).any():
            st = s_arr[~inside]
            N = self.params.N
            C = self.tail_C or self.decay_C
            S, Sp = _tail_series(N, st)
            base = C * np.exp(-st) * st ** (-(N - 1) / 2.0)
            out[~inside] = base * (Sp - S * (1.0 + (N - 1) / (2.0 * st)))
        return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# shooting machinery


def _make_rhs(N: int, p: float):
    Nm1 = float(N - 1)
    pm1 = p - 1.0

    if N == 1:
        def rhs(r, y):
            U, V = y
            return np.array([V, U - math.copysign(abs(U) ** pm1, U)])
    else:
        def rhs(r, y):
            U, V = y
            return np.array([V, U - math.copysign(abs(U) ** pm1, U) - Nm1 * V / r])
    return rhs


def _series_start(U0: float, r0: float, N: int, p: float) -> np.ndarray:
    """Series solution near the removable singularity at r = 0."""
    G = U0 - U0 ** (p - 1.0)
    Gp = 1.0 - (p - 1.0) * U0 ** (p - 2.0)
    c2 = G / (2.0 * N)
    c4 = Gp * c2 / (4.0 * (N + 2.0))
    return np.array([U0 + c2 * r0**2 + c4 * r0**4, 2.0 * c2 * r0 + 4.0 * c4 * r0**3])


def _classify(rhs, r_start: float, y_start: np.ndarray, N: int,
              bracket_width: float = 1e-16) -> str:
    """-> 'crosses' (U reaches 0) or 'turns' (U' reaches 0 with U < 1).

    'turns' covers both blow-up and the damped oscillation into the
    constant state U = 1 that undershooting trajectories exhibit for
    N >= 3.  A trajectory whose amplitude is off the critical one by w
    departs the decaying branch near r_start + ln(1/w)/2 (plus algebraic
    slack from the r^(-(N-1)/2) mode damping), so the integration horizon
    and tolerance are chosen from the current bracket width.
    Undetermined trajectories are resolved by the sign of U + U', which
    separates the growing branch from the crossing one in the far field.
    """
    w = min(max(bracket_width, 1e-16), 1.0)
    r_end = r_start + 0.5 * math.log(1.0 / w) + 6.0 + (N - 1)
    rtol = 1e-10 if w > 1e-6 else CLASSIFY_RTOL
    solver = DOP853(rhs, r_start, y_start, r_end, rtol=rtol, atol=1e-300)
    while solver.status == "running":
        solver.step()
        U, V = solver.y
        if U <= 0.0:
            return "crosses"
        if V >= 0.0 and U < 1.0:
            return "turns"
    return "crosses" if solver.y[0] + solver.y[1] < 0.0 else "turns"


def _bisect(too_high, lo: float, hi: float, min_width: float = 0.0) -> tuple[float, float]:
    """Bisect a bracket (lo not-too-high, hi too-high) to the fp limit.

    The predicate receives (mid, current_width) so the classification
    can scale its integration horizon with the bracket.  min_width stops
    the refinement once further halving is below the quantization of the
    quantity the bracket parameterizes.
    """
    for _ in range(MAX_BISECT):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi or (hi - lo) <= min_width:
            return lo, hi
        if too_high(mid, hi - lo):
            hi = mid
        else:
            lo = mid
    raise NumericalFailureError(
        f"bisection did not collapse within {MAX_BISECT} iterations "
        f"(bracket [{lo!r}, {hi!r}])"
    )


def _solve_segments(N: int, p: float, r_max: float, r0: float = GRID_SPACING):
    """Staged shooting from the series start at r0.

    Returns (U0, segments, jumps): dense solution segments (sol, a, b)
    and the amplitude corrections [(anchor_radius, jump)] applied at the
    re-anchoring points.
    """
    rhs = _make_rhs(N, p)

    def too_high_center(u0, width=1.0):
        return _classify(rhs, r0, _series_start(u0, r0, N, p), N, width) == "crosses"

    lo, hi = 1.0, 2.0
    while not too_high_center(hi):
        hi *= 2.0
        if hi > 2.0**40:
            raise UnsolvableParametersError(
                f"no overshooting amplitude found for U(0) in [1, {hi:g}] (N={N}, p={p})"
            )
    lo, hi = _bisect(too_high_center, lo, hi)
    U0 = 0.5 * (lo + hi)

    # step cap for the first (core) segment: the dense-output interpolant
    # must stay accurate across the core, whose curvature scale is 1/omega
    omega = math.sqrt(abs(1.0 - (p - 1.0) * U0 ** (p - 2.0)))
    core_step = min(0.1, 1.0 / omega)

    segments = []
    jumps = []
    r_a = r0
    y_a = _series_start(U0, r0, N, p)
    while True:
        r_end_seg = min(r_a + ANCHOR_STEP, r_max)
        sol = solve_ivp(
            rhs, (r_a, r_end_seg), y_a, method="DOP853",
            rtol=TABULATE_RTOL, atol=1e-300, dense_output=True,
            max_step=core_step if not segments else np.inf,
        )
        if not sol.success:
            raise NumericalFailureError(
                f"tabulation integration failed on [{r_a}, {r_end_seg}]"
            )
        if r_end_seg >= r_max:
            segments.append((sol, r_a, r_end_seg))
            return U0, segments, jumps
        # Re-anchor: put the state back on the stable manifold by bisecting
        # a shift s along the far-field unstable mode (e^r r^(-nu), with
        # nu = (N-1)/2).  A positive shift blows up or spirals into U = 1
        # (turns), a negative one crosses zero, so the orientation is
        # flipped relative to the center stage.  Shifting along the mode
        # (not in U alone) keeps the assembled curve C^1 across the anchor
        # once the previous segment is smoothed by the same mode.  If the
        # state is too far off-manifold for the bracket (fat-soliton cores
        # amplify the U(0) quantization enormously), the anchor is moved
        # to the midpoint of the segment and retried.
        r_b = r_end_seg
        while True:
            result = _anchor_shift(rhs, sol, r_b, N)
            if result is not None:
                break
            r_b = 0.5 * (r_a + r_b)
            if r_b - r_a < 0.5:
                raise NumericalFailureError(
                    f"re-anchoring failed down to segment length {r_b - r_a:g} "
                    f"near r={r_a:g} (N={N}, p={p})"
                )
        s_mid, mode = result
        segments.append((sol, r_a, r_b))
        jumps.append((r_b, s_mid))
        y_a = sol.sol(r_b) + s_mid * mode
        r_a = r_b


def _anchor_shift(rhs, sol, r_b: float, N: int):
    """Bisect the unstable-mode shift at radius r_b on the dense segment.

    Returns (shift, mode_vector), or None if no bracket exists within a
    45% amplitude window (caller then retries at a smaller radius).
    """
    ya = sol.sol(r_b)
    nu = (N - 1) / 2.0
    mode = np.array([1.0, 1.0 - nu / r_b])

    def too_high(s, width=1e-12):
        return _classify(rhs, r_b, ya + s * mode, N, width / abs(ya[0])) == "turns"

    w0 = 1e-12 * abs(ya[0])
    w = w0
    cap = 0.45 * abs(ya[0])
    if too_high(0.0):
        while too_high(-w):
            w *= 4.0
            if w > cap:
                return None
        lo_s = -w
        hi_s = -w / 4.0 if w > w0 else 0.0
    else:
        while not too_high(w):
            w *= 4.0
            if w > cap:
                return None
        lo_s = w / 4.0 if w > w0 else 0.0
        hi_s = w
    lo_s, hi_s = _bisect(too_high, lo_s, hi_s,
                         min_width=0.25 * np.finfo(float).eps * abs(ya[0]))
    return 0.5 * (lo_s + hi_s), mode


def _tabulate(segments, jumps, N: int, grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    U = np.empty_like(grid)
    dU = np.empty_like(grid)
    for i, (sol, a, b) in enumerate(segments):
        last = i == len(segments) - 1
        m = (grid >= a - 1e-12) & ((grid < b - 1e-12) | last & (grid <= b + 1e-12))
        if m.any():
            Y = sol.sol(np.clip(grid[m], a, b))
            U[m] = Y[0]
            dU[m] = Y[1]
    # Distribute each re-anchoring correction backward over the segment it
    # terminated, along the far-field unstable mode e^r r^(-(N-1)/2).  This
    # removes the amplitude jump at the anchor to leading order, keeping
    # the tabulated curve ODE-consistent across segment boundaries.
    nu = (N - 1) / 2.0
    for (a_k, J_k), (_, seg_start, _) in zip(jumps, segments):
        m = (grid >= max(2.0, seg_start)) & (grid < a_k - 1e-12)
        if not m.any():
            continue
        r = grid[m]
        mode = np.exp(r - a_k) * (a_k / r) ** nu
        U[m] += J_k * mode
        dU[m] += J_k * mode * (1.0 - nu / r)
    return U, dU


def ode_defect(profile: GroundStateProfile) -> float:
    """Max consistency residual of the tabulated (U, U') against the ODE.

    Each grid interval is re-integrated from its left endpoint with
    classical RK4 (substep count raised near the origin where the 1/r
    coefficient is stiff) and the endpoint mismatch, divided by the
    interval width, measures how strongly the tabulated values violate
    the equation.  The r = 0 interval is excluded (removable
    singularity; the stored value there is the series limit).
    """
    N, p = profile.params.N, profile.params.p
    grid, U, dU = profile.r_grid, profile.U_values, profile.dU_values

    def f(r, y):
        Uv, Vv = y
        g = Uv - np.sign(Uv) * np.abs(Uv) ** (p - 1)
        return np.stack([Vv, g - (N - 1) * Vv / r]) if N > 1 else np.stack([Vv, g])

    r = grid[1:-1]
    h_int = np.diff(grid)[1:]
    worst = 0.0
    prev = 0.0
    for thresh, nsub in ((0.1, 512), (0.5, 128), (2.0, 32), (np.inf, 8)):
        sel = (r >= prev) & (r < thresh)
        prev = thresh
        if not sel.any():
            continue
        y = np.stack([U[1:-1][sel], dU[1:-1][sel]])
        rr = r[sel].copy()
        hh = h_int[sel] / nsub
        for _ in range(nsub):
            k1 = f(rr, y)
            k2 = f(rr + 0.5 * hh, y + 0.5 * hh * k1)
            k3 = f(rr + 0.5 * hh, y + 0.5 * hh * k2)
            k4 = f(rr + hh, y + hh * k3)
            y = y + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rr = rr + hh
        nxt = np.where(sel)[0] + 2
        mismatch = (np.abs(y[0] - U[nxt]) + np.abs(y[1] - dU[nxt])) / h_int[sel]
        worst = max(worst, float(mismatch.max()))
    return worst


def decay_constant(profile: GroundStateProfile) -> tuple[float, float]:
    """Plateau estimate of C in U(r) ~ C e^(-r) r^(-(N-1)/2).

    C is the mean of U(r) e^r r^((N-1)/2) over [0.6, 0.8] * r_max and the
    second return value is the (max - min)/mean variation over that window.
    """
    return _decay_from_grid(
        profile.r_grid, profile.U_values, profile.r_max, profile.params.N
    )


def _decay_from_grid(grid, U, r_max, N):
    if r_max < 15.0:
        raise InsufficientResolutionError(
            f"decay-constant window needs r_max >= 15, got {r_max:g}"
        )
    lo, hi = DECAY_WINDOW[0] * r_max, DECAY_WINDOW[1] * r_max
    m = (grid >= lo) & (grid <= hi)
    if m.sum() < MIN_WINDOW_POINTS:
        raise InsufficientResolutionError(
            f"decay-constant window [{lo:g}, {hi:g}] holds {int(m.sum())} grid points "
            f"(need >= {MIN_WINDOW_POINTS})"
        )
    g = U[m] * np.exp(grid[m]) * grid[m] ** ((N - 1) / 2.0)
    mean = float(g.mean())
    return mean, float((g.max() - g.min()) / mean)


def moments(profile: GroundStateProfile) -> Moments:
    """Radial quadrature of I2 = ∫U², Ip = ∫U^p, Igrad = ∫|∇U|² over R^N.

    Composite Simpson on the stored grid with the surface measure
    |S^(N-1)| r^(N-1), plus the analytic tail beyond r_max.  The result
    is Richardson-checked against the half-resolution grid and must
    agree to 1e-8 relative.
    """
    from scipy.integrate import simpson

    N, p = profile.params.N, profile.params.p
    grid, U, dU = profile.r_grid, profile.U_values, profile.dU_values
    area = sphere_area(N)
    w = grid ** (N - 1)
    C, R = profile.tail_C or profile.decay_C, profile.r_max

    def all_three(sl):
        g, u, du, ww = grid[sl], U[sl], dU[sl], w[sl]
        i2 = simpson(u * u * ww, x=g)
        ip = simpson(u**p * ww, x=g)
        ig = simpson(du * du * ww, x=g)
        return np.array([i2, ip, ig])

    full = all_three(slice(None))
    half = all_three(slice(None, None, 2))
    # fourth-order rule: error of the fine result is (fine - coarse)/15
    rel = np.max(np.abs(full - half) / np.abs(full)) / 15.0
    if rel > 1e-8:
        raise NumericalFailureError(
            f"moment quadrature not converged: Richardson error estimate {rel:.2e}"
        )
    # analytic tails: U^2 w -> C^2 e^(-2r); (U')^2 w -> same with the
    # (1 + (N-1)/2r) derivative factor; the U^p tail is ~ e^(-p r_max).
    tail2 = C * C * math.exp(-2.0 * R) / 2.0
    tailg = tail2 * (1.0 + (N - 1) / (2.0 * R)) ** 2
    s_exp = (N - 1) - p * (N - 1) / 2.0
    tailp = C**p * math.exp(-p * R) * R**s_exp / p
    vals = full * area + area * np.array([tail2, tailp, tailg])
    return Moments(I2=float(vals[0]), Ip=float(vals[1]), Igrad=float(vals[2]))


def solve_ground_state(N: int, p: float, r_max: float = 20.0,
                       tol: float = 1e-10) -> GroundStateProfile:
    """Shooting solve of the ground-state profile at eps = 1.

    Postconditions enforced here: the tabulated values satisfy the ODE
    with consistency residual <= tol * max(U) (see ode_defect), U is
    strictly positive and strictly decreasing, and the stored tail
    beyond the splice radius is the asymptotic form, which makes
    evaluation continuous at r_max by construction.

    Near the edges of the exponent window the core becomes so stiff that
    double precision cannot deliver a 1e-10 consistency residual; such
    parameters need a looser tol and fail loudly otherwise.
    """
    params = ProblemParams(N=N, p=p, eps=1.0)
    if r_max < 15.0:
        raise ConfigurationError(f"r_max must be >= 15, got {r_max:g}")
    if not 0.0 < tol <= 1e-6:
        raise ConfigurationError(f"tol must lie in (0, 1e-6], got {tol:g}")

    U0, segments, jumps = _solve_segments(N, p, r_max)

    # The grid must resolve the core, whose curvature scale is set by the
    # linearization frequency at the center amplitude; spacing is 0.01 or
    # a dyadic refinement of it, whichever is finer.  A refined grid also
    # moves the series start radius, which requires a fresh solve.
    omega = math.sqrt(abs(1.0 - (p - 1.0) * U0 ** (p - 2.0)))
    h = GRID_SPACING
    while h > 0.15 / omega:
        h /= 2.0
    if h < GRID_SPACING:
        U0, segments, jumps = _solve_segments(N, p, r_max, r0=h)
    n = int(round(r_max / h))
    grid = np.minimum(h * np.arange(n + 1), r_max)
    U = np.empty_like(grid)
    dU = np.empty_like(grid)
    U[0], dU[0] = U0, 0.0
    U[1:], dU[1:] = _tabulate(segments, jumps, N, grid[1:])

    C, variation = _decay_from_grid(grid, U, r_max, N)

    # Tail splice: beyond the last radius where U > 10 tol the integration
    # noise dominates and the stored values are replaced by the asymptotic
    # form.  The tail constant is anchored to the raw value at the splice
    # point (or at r_max when the amplitude never falls below 10 tol), so
    # the tail is continuous with the stored grid in every case; it agrees
    # with the plateau mean C to within the reported variation.
    above = np.nonzero(U > 10.0 * tol)[0]
    i_splice = min(int(above[-1]), U.size - 1)
    splice_r = float(grid[i_splice])
    nu = (N - 1) / 2.0
    S_sp, _ = _tail_series(N, splice_r)
    tail_C = float(U[i_splice] * math.exp(splice_r) * splice_r**nu / S_sp)
    t = grid[i_splice:]
    S, Sp = _tail_series(N, t)
    base = tail_C * np.exp(-t) * t ** (-nu)
    U[i_splice:] = base * S
    dU[i_splice:] = base * (Sp - S * (1.0 + nu / t))

    if not (np.all(U > 0.0) and np.all(np.diff(U) < 0.0)):
        raise NumericalFailureError("profile is not strictly positive and decreasing")

    profile = GroundStateProfile(
        params=params, r_grid=grid, U_values=U, dU_values=dU,
        r_max=r_max, tol=tol, decay_C=C, decay_variation=variation,
        moments=Moments(0.0, 0.0, 0.0), splice_r=splice_r, tail_C=tail_C,
    )
    defect = ode_defect(profile)
    if defect > tol * U0:
        raise NumericalFailureError(
            f"ODE residual {defect:.3e} exceeds tol * max(U) = {tol * U0:.3e} "
            f"(N={N}, p={p}, r_max={r_max}, tol={tol:g})"
        )
    profile.moments = moments(profile)
    return profile


# ---------------------------------------------------------------------------
# profile cache (CSV, bit round-tripping via repr floats)

_HEADER = "# multibump-profile v1"
_memory_cache: dict[tuple, GroundStateProfile] = {}


def cache_key(N: int, p: float, r_max: float, tol: float) -> str:
    return f"profile_N{N}_p{p!r}_rmax{r_max!r}_tol{tol!r}.csv"


def write_profile(path: Path | str, profile: GroundStateProfile) -> None:
    p = profile.params
    lines = [
        f"{_HEADER} N={p.N} p={p.p!r} rmax={profile.r_max!r} "
        f"tol={profile.tol!r} C={profile.decay_C!r}"
    ]
    for r, u, du in zip(profile.r_grid, profile.U_values, profile.dU_values):
        lines.append(f"{float(r)!r},{float(u)!r},{float(du)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_profile(path: Path | str) -> GroundStateProfile:
    text = Path(path).read_text().splitlines()
    head = text[0]
    if not head.startswith(_HEADER):
        raise ConfigurationError(f"{path}: not a multibump profile file")
    fields = dict(tok.split("=", 1) for tok in head[len(_HEADER):].split())
    N = int(fields["N"])
    p = float(fields["p"])
    r_max = float(fields["rmax"])
    tol = float(fields["tol"])
    C = float(fields["C"])
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:] if line])
    grid, U, dU = data[:, 0], data[:, 1], data[:, 2]
    _, variation = _decay_from_grid(grid, U, r_max, N)
    above = np.nonzero(U > 10.0 * tol)[0]
    i_splice = min(int(above[-1]), U.size - 1)
    splice_r = float(grid[i_splice])
    # stored values beyond the splice are exactly the anchored tail form
    S_sp, _ = _tail_series(N, splice_r)
    tail_C = float(U[i_splice] * math.exp(splice_r) * splice_r ** ((N - 1) / 2.0) / S_sp)
    profile = GroundStateProfile(
        params=ProblemParams(N=N, p=p, eps=1.0), r_grid=grid, U_values=U,
        dU_values=dU, r_max=r_max, tol=tol, decay_C=C, decay_variation=variation,
        moments=Moments(0.0, 0.0, 0.0), splice_r=splice_r, tail_C=tail_C,
    )
    profile.moments = moments(profile)
    return profile


def get_profile(N: int, p: float, r_max: float = 20.0, tol: float = 1e-10,
                cache_dir: Path | str | None = None) -> GroundStateProfile:
    """Cached ground-state lookup keyed by (N, p, r_max, tol).

    Checks the in-process cache, then cache_dir (if given), and only
    then solves; fresh solves are persisted to cache_dir.
    """
    key = (N, float(p), float(r_max), float(tol))
    if key in _memory_cache:
        return _memory_cache[key]
    path = None
    if cache_dir is not None:
        path = Path(cache_dir) / cache_key(N, p, r_max, tol)
        if path.exists():
            profile = read_profile(path)
            _memory_cache[key] = profile
            return profile
    profile = solve_ground_state(N, p, r_max, tol)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        write_profile(path, profile)
    _memory_cache[key] = profile
    return profile
