"""Problem parameters, potentials, and peak-ring configurations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class ProblemParams:
    """Dimension N, nonlinearity exponent p, and length scale eps.

    The exponent window is 2 < p < 2N/(N-2) for N >= 3.  N = 1 and N = 2
    admit any p > 2 and are used for closed-form validation only.
    """

    N: int
    p: float
    eps: float = 1.0

    def __post_init__(self):
        if self.N < 1:
            raise ConfigurationError(f"dimension N must be >= 1, got {self.N}")
        if self.eps <= 0:
            raise ConfigurationError(f"eps must be positive, got {self.eps}")
        if self.p <= 2:
            raise ConfigurationError(f"exponent p must exceed 2, got {self.p}")
        if self.N >= 3 and self.p >= 2 * self.N / (self.N - 2):
            raise ConfigurationError(
                f"p={self.p} is not subcritical for N={self.N} "
                f"(need p < {2 * self.N / (self.N - 2)})"
            )


@dataclass(frozen=True)
class PotentialModel:
    """Radial trap profile V(r) = V_inf + sign * a / (1 + r^2)^(m/2).

    The default family is smooth, has a nondegenerate critical point at
    r = 0 (V''(0) = -sign * m * a), and realizes the algebraic tail
    V_inf + sign * a / r^m with relative correction O(r^-2), so the
    effective tail-remainder exponent is delta_eff = 2.
    """

    sign: int = +1
    a: float = 1.0
    m: float = 2.0
    V_inf: float = 1.0
    form: str = "inverse_power_smooth"

    delta_eff: float = field(init=False, default=2.0)

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ConfigurationError(f"potential sign must be +1 or -1, got {self.sign}")
        if self.a <= 0:
            raise ConfigurationError(f"tail strength a must be positive, got {self.a}")
        if self.m <= 1:
            raise ConfigurationError(f"tail exponent m must exceed 1, got {self.m}")
        if self.form != "inverse_power_smooth":
            raise ConfigurationError(f"unknown potential form {self.form!r}")
        if self.sign < 0 and self.a >= self.V_inf:
            raise ConfigurationError(
                f"a={self.a} with sign=-1 makes V(0) <= 0 (need a < V_inf={self.V_inf})"
            )

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.V_inf + self.sign * self.a * (1.0 + r * r) ** (-self.m / 2.0)

    def deviation(self, r):
        """V(r) - V_inf, the part that drives the tail interaction."""
        r = np.asarray(r, dtype=float)
        return self.sign * self.a * (1.0 + r * r) ** (-self.m / 2.0)


MODES = ("same_sign", "alternating")


@dataclass(frozen=True)
class PeakConfiguration:
    """Ring of peaks: k same-sign peaks at angles 2(j-1)pi/k, or 2k peaks
    at angles (j-1)pi/k with signs (-1)^j."""

    k: int
    r: float
    mode: str = "same_sign"
    N: int = 3

    def __post_init__(self):
        if self.k < 1:
            raise ConfigurationError(f"fold number k must be >= 1, got {self.k}")
        if self.r <= 0:
            raise ConfigurationError(f"ring radius must be positive, got {self.r}")
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.N < 2:
            raise ConfigurationError("ring configurations need N >= 2")

    @property
    def peak_count(self) -> int:
        return self.k if self.mode == "same_sign" else 2 * self.k

    def angles(self) -> np.ndarray:
        if self.mode == "same_sign":
            return 2.0 * np.pi * np.arange(self.k) / self.k
        return np.pi * np.arange(2 * self.k) / self.k

    def signs(self) -> np.ndarray:
        if self.mode == "same_sign":
            return np.ones(self.k)
        # j runs 1..2k in the defining convention; index 0 here is j=1
        return (-1.0) ** np.arange(1, 2 * self.k + 1)

    def positions(self) -> np.ndarray:
        """Peak centers, shape (peak_count, N); ring lives in the first
        two coordinates, remaining coordinates zero."""
        th = self.angles()
        pos = np.zeros((th.size, self.N))
        pos[:, 0] = self.r * np.cos(th)
        pos[:, 1] = self.r * np.sin(th)
        return pos

    def chord_classes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Distinct pair separations on the ring.

        Returns (chords, multiplicities, sign_products) indexed by the
        index-offset class c = 1..floor(P/2) with P peaks on the ring:
        chord 2 r sin(c pi / P), multiplicity P (or P/2 at the diameter
        class when P is even), and the common sign product of all pairs
        in the class.
        """
        P = self.peak_count
        cmax = P // 2
        c = np.arange(1, cmax + 1)
        chords = 2.0 * self.r * np.sin(np.pi * c / P)
        mult = np.full(cmax, float(P))
        if P % 2 == 0:
            mult[-1] = P / 2.0
        if self.mode == "same_sign":
            sgn = np.ones(cmax)
        else:
            sgn = (-1.0) ** c
        return chords, mult, sgn


def peak_positions(config: PeakConfiguration) -> list[tuple[np.ndarray, float]]:
    """Deterministically ordered (position, sign) pairs, j = 1..P."""
    return list(zip(config.positions(), config.signs()))


@dataclass(frozen=True)
class WindowSpec:
    """Search window [(c - theta) k ln k, (c + theta) k ln k] for the
    ring radius, with c = eps*m/(2 pi) for same-sign rings and
    c = eps*m/pi for alternating ones."""

    eps: float
    m: float
    mode: str = "same_sign"
    theta: float | None = None  # defaults to 0.3 * c

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.theta is None:
            object.__setattr__(self, "theta", 0.3 * self.c)
        if not 0 < self.theta < self.c:
            raise ConfigurationError(
                f"window half-width theta={self.theta} must lie in (0, c={self.c}) "
                "or the lower window edge is not positive"
            )

    @property
    def c(self) -> float:
        scale = 2.0 * np.pi if self.mode == "same_sign" else np.pi
        return self.eps * self.m / scale

    def lo(self, k: int) -> float:
        return (self.c - self.theta) * k * math.log(k)

    def hi(self, k: int) -> float:
        return (self.c + self.theta) * k * math.log(k)


@dataclass(frozen=True)
class ReducedConstants:
    """Coefficients of the reduced ring energy.

    alpha: per-bump energy (1/2 - 1/p) * eps^N * Ip
    beta:  eps^N * I2, the weight of the potential-tail term
    B1:    prefactor of the pair interaction w(d) ~ B1 (d/eps)^(-(N-1)/2) e^(-d/eps) eps^N
    """

    alpha: float
    beta: float
    B1: float
    eps: float
    N: int
    p: float

    def __post_init__(self):
        if min(self.alpha, self.beta, self.B1) <= 0:
            raise ConfigurationError("reduced-energy constants must all be positive")

    def w_model(self, d):
        """Asymptotic pair interaction at center distance d."""
        d = np.asarray(d, dtype=float)
        s = d / self.eps
        return self.B1 * self.eps**self.N * s ** (-(self.N - 1) / 2.0) * np.exp(-s)
