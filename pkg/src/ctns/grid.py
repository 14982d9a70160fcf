"""Rectangular domains, uniform Cartesian grids, and field containers.

Scalars (cell density n, oxygen c, potentials) live at cell centers; the
velocity lives on a MAC staggered arrangement with face-normal components.
All integrals use the midpoint (cell-average) rule, which is second-order
consistent with the 5-point stencils used elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RectDomain",
    "ScalarField",
    "VectorField",
    "SystemState",
    "build_grid",
    "mean",
    "lp_norm",
]

#: tolerance on the discrete divergence of an admissible velocity field
DIV_TOL = 1e-10


class GridError(ValueError):
    """Invalid domain/grid parameters."""


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle [0,Lx] x [0,Ly] cut into nx*ny square cells."""

    Lx: float
    Ly: float
    nx: int
    ny: int
    h: float = field(init=False)

    def __post_init__(self):
        if self.Lx <= 0 or self.Ly <= 0:
            raise GridError("domain lengths must be positive")
        if self.nx < 4 or self.ny < 4:
            raise GridError("need at least 4 cells per direction")
        hx = self.Lx / self.nx
        hy = self.Ly / self.ny
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            raise GridError(
                f"anisotropic spacing: Lx/nx={hx!r} != Ly/ny={hy!r}"
            )
        object.__setattr__(self, "h", hx)

    @property
    def volume(self) -> float:
        return self.Lx * self.Ly

    @property
    def ncells(self) -> int:
        return self.nx * self.ny

    def cell_centers(self):
        """(x, y) meshgrids of cell-center coordinates, shape (nx, ny)."""
        x = (np.arange(self.nx) + 0.5) * self.h
        y = (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def xface_centers(self):
        """Coordinates of x-face midpoints, shape (nx+1, ny)."""
        x = np.arange(self.nx + 1) * self.h
        y = (np.arange(self.ny) + 0.5) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def yface_centers(self):
        """Coordinates of y-face midpoints, shape (nx, ny+1)."""
        x = (np.arange(self.nx) + 0.5) * self.h
        y = np.arange(self.ny + 1) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def boundary_distance(self):
        """Distance from each cell center to the nearest wall, shape (nx, ny)."""
        x, y = self.cell_centers()
        return np.minimum.reduce([x, self.Lx - x, y, self.Ly - y])


def build_grid(Lx: float, Ly: float, nx: int, ny: int) -> RectDomain:
    """Build an isotropic uniform grid; raises GridError for bad input."""
    return RectDomain(float(Lx), float(Ly), int(nx), int(ny))


@dataclass
class ScalarField:
    """Cell-centered scalar values, shape (nx, ny)."""

    domain: RectDomain
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.domain.nx, self.domain.ny):
            raise GridError(
                f"scalar shape {self.values.shape} != grid "
                f"({self.domain.nx}, {self.domain.ny})"
            )
        if not np.all(np.isfinite(self.values)):
            raise GridError("nonfinite scalar values")

    @classmethod
    def zeros(cls, domain: RectDomain) -> "ScalarField":
        return cls(domain, np.zeros((domain.nx, domain.ny)))

    @classmethod
    def constant(cls, domain: RectDomain, value: float) -> "ScalarField":
        return cls(domain, np.full((domain.nx, domain.ny), float(value)))

    @classmethod
    def from_function(cls, domain: RectDomain, f) -> "ScalarField":
        x, y = domain.cell_centers()
        return cls(domain, np.asarray(f(x, y), dtype=float))

    def copy(self) -> "ScalarField":
        return ScalarField(self.domain, self.values.copy())


@dataclass
class VectorField:
    """MAC velocity: ux on x-faces (nx+1, ny), uy on y-faces (nx, ny+1).

    Boundary-normal faces carry the wall value (0 for no-slip); tangential
    wall behaviour is realised by odd ghost reflection inside the operators.
    """

    domain: RectDomain
    ux: np.ndarray
    uy: np.ndarray

    def __post_init__(self):
        self.ux = np.asarray(self.ux, dtype=float)
        self.uy = np.asarray(self.uy, dtype=float)
        d = self.domain
        if self.ux.shape != (d.nx + 1, d.ny) or self.uy.shape != (d.nx, d.ny + 1):
            raise GridError("staggered component shapes do not match grid")
        if not (np.all(np.isfinite(self.ux)) and np.all(np.isfinite(self.uy))):
            raise GridError("nonfinite velocity values")

    @classmethod
    def zeros(cls, domain: RectDomain) -> "VectorField":
        return cls(
            domain,
            np.zeros((domain.nx + 1, domain.ny)),
            np.zeros((domain.nx, domain.ny + 1)),
        )

    def copy(self) -> "VectorField":
        return VectorField(self.domain, self.ux.copy(), self.uy.copy())

    def enforce_noslip(self) -> None:
        """Zero the boundary-normal faces in place."""
        self.ux[0, :] = 0.0
        self.ux[-1, :] = 0.0
        self.uy[:, 0] = 0.0
        self.uy[:, -1] = 0.0

    def max_speed(self) -> float:
        mx = float(np.max(np.abs(self.ux))) if self.ux.size else 0.0
        my = float(np.max(np.abs(self.uy))) if self.uy.size else 0.0
        return max(mx, my)

    def l2_norm(self) -> float:
        h = self.domain.h
        return math.sqrt(
            h * h * (float(np.sum(self.ux**2)) + float(np.sum(self.uy**2)))
        )


@dataclass
class SystemState:
    """Solution snapshot (n, c, u) at time t."""

    n: ScalarField
    c: ScalarField
    u: VectorField
    t: float = 0.0
    clipped_mass: float = 0.0  # running audit of positivity clipping

    def copy(self) -> "SystemState":
        return SystemState(
            self.n.copy(), self.c.copy(), self.u.copy(), self.t, self.clipped_mass
        )


def mean(f: ScalarField) -> float:
    """Domain average (1/|Omega|) * integral of f (midpoint rule)."""
    d = f.domain
    return d.h * d.h * float(np.sum(f.values)) / d.volume


def lp_norm(f: ScalarField, p: float) -> float:
    """Midpoint-rule L^p norm; p = inf returns the max of |f|."""
    if p != math.inf and p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    a = np.abs(f.values)
    if p == math.inf:
        return float(np.max(a))
    d = f.domain
    return float((d.h * d.h * np.sum(a**p)) ** (1.0 / p))


def lp_norm_values(values: np.ndarray, h: float, p: float) -> float:
    """lp_norm for a bare array of cell (or face) samples."""
    if p != math.inf and p < 1:
        raise ValueError(f"L^p norm needs p >= 1, got {p}")
    a = np.abs(values)
    if p == math.inf:
        return float(np.max(a))
    return float((h * h * np.sum(a**p)) ** (1.0 / p))
