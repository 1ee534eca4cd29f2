"""Complex optical potentials on uniform grids, and the discretized operator H = -d2/dx2 + V(x) - g0."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform grid of ``n`` interior points on (x_min, x_max).

    The endpoints themselves are not unknowns: they carry the Dirichlet zeros.
    """

    n: int
    x_min: float
    x_max: float

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n + 1)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.h * np.arange(1, self.n + 1)

    @property
    def is_symmetric(self) -> bool:
        scale = max(abs(self.x_min), abs(self.x_max))
        return abs(self.x_min + self.x_max) <= 1e-12 * scale

    def integrate(self, f: np.ndarray) -> complex:
        """Trapezoidal quadrature of interior samples (endpoint values are zero)."""
        padded = np.concatenate(([0.0], np.asarray(f), [0.0]))
        return np.trapezoid(padded, dx=self.h)


def build_grid(x_min: float, x_max: float, n: int) -> Grid:
    if not (math.isfinite(x_min) and math.isfinite(x_max)):
        raise ValueError(f"grid bounds must be finite, got ({x_min}, {x_max})")
    if not x_max > x_min:
        raise ValueError(f"empty domain: x_max={x_max} <= x_min={x_min}")
    if int(n) != n or n < 3:
        raise ValueError(f"need at least 3 interior points, got n={n}")
    return Grid(int(n), float(x_min), float(x_max))


# --- potentials -------------------------------------------------------------


@dataclass(frozen=True)
class SquireWell:
    """Top-hat mirror of half-width ``u`` with tilt ``gamma``: V = i*gamma*x inside, hard walls at +-u."""

    u: float
    gamma: float = 0.0

    def __post_init__(self):
        if not self.u > 0:
            raise ValueError(f"SquireWell half-width must be positive, got u={self.u}")


@dataclass(frozen=True)
class QuarticDoubleWell:
    """Re V = beta*(x^2 - x0^2)^2, Im V = gamma*x."""

    beta: float
    x0: float
    gamma: float = 0.0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.x0 > 0:
            raise ValueError(f"x0 must be positive, got {self.x0}")


@dataclass(frozen=True, eq=False)
class MirrorProfile:
    """Sampled mirror: power reflectance ``R`` in (0, 1] and phase ``delta`` (radians) on grid points."""

    R: np.ndarray
    delta: np.ndarray | None = None
    gamma: float = 0.0  # extra tilt added on top of the sampled phase

    def __post_init__(self):
        R = np.asarray(self.R, dtype=float)
        if np.any(~np.isfinite(R)) or np.any(R <= 0) or np.any(R > 1):
            raise ValueError("mirror reflectance samples must lie in (0, 1]")
        object.__setattr__(self, "R", R)
        d = np.zeros_like(R) if self.delta is None else np.asarray(self.delta, dtype=float)
        if d.shape != R.shape:
            raise ValueError("reflectance and phase samples differ in length")
        object.__setattr__(self, "delta", d)


PotentialSpec = Union[SquireWell, QuarticDoubleWell, MirrorProfile]


def potential_from_mirror(R, delta) -> np.ndarray:
    """V = -ln sqrt(R) - i*delta for a mirror r = sqrt(R) exp(i*delta)."""
    R = np.asarray(R, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(R <= 0):
        raise ValueError("reflectance must be strictly positive; use SquireWell for hard apertures")
    return -0.5 * np.log(R) - 1j * delta


def evaluate_potential(spec: PotentialSpec, grid: Grid) -> np.ndarray:
    x = grid.x
    if isinstance(spec, SquireWell):
        tol = 1e-9 * spec.u
        if grid.x_min < -spec.u - tol or grid.x_max > spec.u + tol:
            raise ValueError(
                f"grid ({grid.x_min}, {grid.x_max}) extends past the hard walls at +-{spec.u}"
            )
        if abs(grid.x_min + spec.u) > tol or abs(grid.x_max - spec.u) > tol:
            raise ValueError("SquireWell grid endpoints must coincide with the walls at +-u")
        return 1j * spec.gamma * x
    if isinstance(spec, QuarticDoubleWell):
        return spec.beta * (x**2 - spec.x0**2) ** 2 + 1j * spec.gamma * x
    if isinstance(spec, MirrorProfile):
        if spec.R.shape != (grid.n,):
            raise ValueError(f"mirror has {spec.R.size} samples but grid has {grid.n} points")
        return potential_from_mirror(spec.R, spec.delta) + 1j * spec.gamma * x
    raise TypeError(f"unknown potential spec {spec!r}")


def default_grid(spec: PotentialSpec, n: int | None = None) -> Grid:
    """Standard computational box: the walls for SquireWell, [-30, 30] for the double well."""
    if isinstance(spec, SquireWell):
        return build_grid(-spec.u, spec.u, 2000 if n is None else n)
    if isinstance(spec, QuarticDoubleWell):
        return build_grid(-30.0, 30.0, 3000 if n is None else n)
    raise ValueError("sampled mirror profiles carry their own grid")


# --- operator ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Tridiagonal N x N operator stored by its three diagonals.

    ``lower[j]`` is entry (j+1, j) and ``upper[j]`` entry (j, j+1).
    """

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    grid: Grid | None = None
    g0: float = 0.0
    potential: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    @property
    def is_complex_symmetric(self) -> bool:
        return np.array_equal(self.lower, self.upper)

    def dense(self) -> np.ndarray:
        a = np.diag(self.diag.astype(complex))
        idx = np.arange(self.n - 1)
        a[idx + 1, idx] = self.lower
        a[idx, idx + 1] = self.upper
        return a

    def matvec(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[1:] += self.lower * v[:-1]
        out[:-1] += self.upper * v[1:]
        return out

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(
            self.diag.conj(), self.upper.conj(), self.lower.conj(), self.grid, self.g0, None
        )

    def shifted(self, g0: float) -> "OperatorMatrix":
        """Same operator with the gain shift replaced by ``g0``."""
        return OperatorMatrix(
            self.diag + (self.g0 - g0), self.lower, self.upper, self.grid, g0, self.potential
        )

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[1:] += np.abs(self.lower)
        row[:-1] += np.abs(self.upper)
        return float(row.max())

    @classmethod
    def from_dense(cls, a) -> "OperatorMatrix":
        a = np.asarray(a, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("operator must be square")
        if np.any(np.triu(a, 2)) or np.any(np.tril(a, -2)):
            raise ValueError("matrix is not tridiagonal")
        return cls(np.diag(a).copy(), np.diag(a, -1).copy(), np.diag(a, 1).copy())


def laplacian_diagonals(grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the Dirichlet matrix for -d2/dx2."""
    inv_h2 = 1.0 / grid.h**2
    return np.full(grid.n, 2.0 * inv_h2), np.full(grid.n - 1, -inv_h2)


def assemble_hamiltonian(spec: PotentialSpec, grid: Grid, g0: float = 0.0) -> OperatorMatrix:
    v = evaluate_potential(spec, grid)
    d, off = laplacian_diagonals(grid)
    off = off.astype(complex)
    return OperatorMatrix(d + v - g0, off, off.copy(), grid, float(g0), v)


# --- mirror files -----------------------------------------------------------


def load_mirror_csv(path: str | Path) -> tuple[Grid, MirrorProfile]:
    """Read a two- or three-column CSV (x, R[, delta]) sampled on a uniform grid.

    Lines starting with ``#`` and a non-numeric header row are skipped.
    """
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in rec])
            except ValueError:
                if rows:
                    raise
                continue  # header
    if not rows:
        raise ValueError(f"{path}: no samples")
    width = {len(r) for r in rows}
    if width not in ({2}, {3}):
        raise ValueError(f"{path}: expected 2 or 3 columns, found {sorted(width)}")
    data = np.array(rows)
    x = data[:, 0]
    steps = np.diff(x)
    if x.size < 3 or np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps.mean():
        raise ValueError(f"{path}: x samples must be uniform and increasing")
    h = steps.mean()
    grid = build_grid(x[0] - h, x[-1] + h, x.size)
    delta = data[:, 2] if data.shape[1] == 3 else None
    return grid, MirrorProfile(data[:, 1], delta)
