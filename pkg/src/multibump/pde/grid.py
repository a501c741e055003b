"""Cartesian box grids with reflection-symmetric storage and field I/O.

The box is [-L, L]^3 with n interior nodes per axis and homogeneous
Dirichlet outer boundary, h = 2L/(n+1).  n must be even so the node set
splits cleanly at half-integer offsets (x = +-h/2, +-3h/2, ...) around
each symmetry plane: a field even in x2/x3 stores only the positive
half along that axis and the reflected values are unrepresentable
rather than merely unchecked.  Every stored node then represents
2^(number of symmetric axes) box nodes.

Snapshot format MBF1: magic 'MBF1', int64 dims (full box, x fastest),
six float64 bounding-box values, then float64 node values of the full
unfolded box in x-fastest order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError

MAGIC = b"MBF1"


@dataclass(frozen=True)
class Grid3:
    """Box discretization with symmetry-aware storage."""

    L: float
    n: int
    even_x2: bool = True
    even_x3: bool = True

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ConfigurationError(f"n must be even and >= 4, got {self.n}")
        if self.L <= 0:
            raise ConfigurationError(f"box half-width must be positive, got {self.L}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / (self.n + 1)

    @property
    def stored_shape(self) -> tuple[int, int, int]:
        half = self.n // 2
        return (
            self.n,
            half if self.even_x2 else self.n,
            half if self.even_x3 else self.n,
        )

    @property
    def multiplicity(self) -> int:
        return (2 if self.even_x2 else 1) * (2 if self.even_x3 else 1)

    def axis_full(self) -> np.ndarray:
        """Full-axis interior coordinates, ascending."""
        return -self.L + self.h * (1.0 + np.arange(self.n))

    def stored_coords(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Per-axis coordinates of the stored fundamental domain."""
        full = self.axis_full()
        half = full[self.n // 2:]
        return (
            full,
            half if self.even_x2 else full,
            half if self.even_x3 else full,
        )

    def meshgrid(self):
        x, y, z = self.stored_coords()
        return np.meshgrid(x, y, z, indexing="ij", sparse=True)

    def radii(self) -> np.ndarray:
        X, Y, Z = self.meshgrid()
        return np.sqrt(X * X + Y * Y + Z * Z)

    def check_resolution(self, eps: float) -> None:
        if self.h > eps / 6.0 + 1e-12:
            raise ConfigurationError(
                f"refinement needs h <= eps/6: h={self.h:g}, eps={eps:g} "
                f"(increase n beyond {self.n})"
            )


@dataclass
class Field:
    """Values on the stored fundamental domain of a Grid3."""

    grid: Grid3
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.stored_shape:
            raise ConfigurationError(
                f"field shape {self.values.shape} does not match stored "
                f"domain {self.grid.stored_shape}"
            )

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())

    def unfold(self) -> np.ndarray:
        """Reconstruct the full (n, n, n) box array by mirroring."""
        v = self.values
        if self.grid.even_x2:
            v = np.concatenate([v[:, ::-1, :], v], axis=1)
        if self.grid.even_x3:
            v = np.concatenate([v[:, :, ::-1], v], axis=2)
        return v

    @staticmethod
    def fold(grid: Grid3, full: np.ndarray) -> "Field":
        """Restrict a full box array to the stored fundamental domain."""
        if full.shape != (grid.n, grid.n, grid.n):
            raise ConfigurationError("full array shape does not match the grid")
        half = grid.n // 2
        v = full
        if grid.even_x2:
            v = v[:, half:, :]
        if grid.even_x3:
            v = v[:, :, half:]
        return Field(grid, np.ascontiguousarray(v))


def write_field(path: Path | str, fld: Field) -> None:
    grid = fld.grid
    full = fld.unfold()
    header = MAGIC + struct.pack(
        "<3q6d", grid.n, grid.n, grid.n,
        -grid.L, grid.L, -grid.L, grid.L, -grid.L, grid.L,
    )
    # x-fastest order: transpose so the x index varies fastest in memory
    payload = np.ascontiguousarray(full.transpose(2, 1, 0)).tobytes()
    Path(path).write_bytes(header + payload)


def read_field(path: Path | str, even_x2: bool = True, even_x3: bool = True) -> Field:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise ConfigurationError(f"{path}: not an MBF1 field snapshot")
    nx, ny, nz = struct.unpack_from("<3q", raw, 4)
    box = struct.unpack_from("<6d", raw, 4 + 24)
    if not (nx == ny == nz):
        raise ConfigurationError("MBF1 reader expects a cubic grid")
    L = box[1]
    vals = np.frombuffer(raw, dtype="<f8", count=nx * ny * nz, offset=4 + 24 + 48)
    full = vals.reshape(nz, ny, nx).transpose(2, 1, 0)
    grid = Grid3(L=L, n=nx, even_x2=even_x2, even_x3=even_x3)
    return Field.fold(grid, full)
