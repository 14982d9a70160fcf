"""Tensor-valued chemotactic sensitivities and their boundary cutoff.

The catalog covers the zero tensor, scalar multiples of the identity,
rotation tensors (which drive cell flux with a component perpendicular to
the oxygen gradient), a spatially modulated rotation, and interpolated
user tables.  Every entry obeys a declared uniform Frobenius bound, and an
optional cutoff factor rho_eta makes the tensor vanish near the walls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import RectDomain, ScalarField

__all__ = [
    "SensitivitySpec",
    "CutoffField",
    "eval_tensor",
    "build_cutoff",
    "eta_convergence_study",
]


def eta_convergence_study(state0, spec, phi, cfg, eta_list, horizon):
    """Cutoff-width convergence of the full dynamics; see simulate module."""
    from .simulate import eta_convergence_study as impl

    return impl(state0, spec, phi, cfg, eta_list, horizon)

KINDS = ("zero", "scalar_chi", "rotation", "space_modulated", "custom_table")


class SensitivityError(ValueError):
    pass


@dataclass(frozen=True)
class SensitivitySpec:
    """Parameters of one sensitivity tensor S(x, n, c)."""

    kind: str = "zero"
    chi: float = 0.0
    theta: float = 0.0  # rotation angle, radians
    C_S: float = 1.0  # declared uniform Frobenius bound
    eta: float = 0.0  # boundary cutoff width, 0 = no cutoff
    table: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SensitivityError(f"unknown sensitivity kind {self.kind!r}")
        if self.C_S <= 0:
            raise SensitivityError("C_S must be positive")
        if self.eta < 0:
            raise SensitivityError("eta must be >= 0")
        if self.kind == "custom_table" and self.table is None:
            raise SensitivityError("custom_table kind needs a table")


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """Quintic smoothstep: C^2 ramp from 0 at t<=0 to 1 at t>=1."""
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def cutoff_values(domain: RectDomain, eta: float, x: np.ndarray, y: np.ndarray):
    """rho_eta sampled at arbitrary points: 0 within eta/2 of the wall, 1 beyond eta."""
    if eta == 0.0:
        return np.ones_like(np.asarray(x, dtype=float))
    d = np.minimum.reduce([x, domain.Lx - x, y, domain.Ly - y])
    return _smoothstep((d - 0.5 * eta) / (0.5 * eta))


@dataclass
class CutoffField:
    """rho_eta sampled at cell centers."""

    eta: float
    rho: ScalarField


def build_cutoff(domain: RectDomain, eta: float) -> CutoffField:
    if eta < 0:
        raise SensitivityError("eta must be >= 0")
    if eta > 0 and eta >= min(domain.Lx, domain.Ly) / 4:
        raise SensitivityError("cutoff width eta too large for the domain")
    x, y = domain.cell_centers()
    return CutoffField(eta, ScalarField(domain, cutoff_values(domain, eta, x, y)))


def _table_interp(table: dict, x1, n_val, c_val):
    from scipy.interpolate import RegularGridInterpolator

    axes = (
        np.asarray(table["x1"], dtype=float),
        np.asarray(table["n"], dtype=float),
        np.asarray(table["c"], dtype=float),
    )
    pts = np.stack(
        [
            np.clip(x1, axes[0][0], axes[0][-1]),
            np.clip(n_val, axes[1][0], axes[1][-1]),
            np.clip(c_val, axes[2][0], axes[2][-1]),
        ],
        axis=-1,
    )
    out = np.empty(np.shape(x1) + (2, 2))
    for i in range(2):
        for j in range(2):
            interp = RegularGridInterpolator(axes, np.asarray(table[f"s{i}{j}"], dtype=float))
            out[..., i, j] = interp(pts)
    return out


def eval_tensor(
    spec: SensitivitySpec,
    x: np.ndarray,
    y: np.ndarray,
    n_val: np.ndarray,
    c_val: np.ndarray,
    domain: Optional[RectDomain] = None,
) -> np.ndarray:
    """Evaluate S (or rho_eta*S) at the given points; shape (..., 2, 2).

    Raises if the sampled Frobenius norm exceeds the declared bound C_S.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n_val = np.asarray(n_val, dtype=float)
    c_val = np.asarray(c_val, dtype=float)
    if np.any(n_val < 0) or np.any(c_val < 0):
        raise SensitivityError("sensitivity evaluated at negative n or c")

    shape = np.broadcast_shapes(x.shape, n_val.shape, c_val.shape)
    S = np.zeros(shape + (2, 2))
    if spec.kind == "zero":
        pass
    elif spec.kind == "scalar_chi":
        S[..., 0, 0] = spec.chi
        S[..., 1, 1] = spec.chi
    elif spec.kind in ("rotation", "space_modulated"):
        ct, st = math.cos(spec.theta), math.sin(spec.theta)
        amp = np.full(shape, spec.chi)
        if spec.kind == "space_modulated":
            if domain is None:
                raise SensitivityError("space_modulated needs the domain")
            amp = amp * 0.5 * (
                1.0
                - np.cos(2.0 * np.pi * x / domain.Lx)
                * np.cos(2.0 * np.pi * y / domain.Ly)
            )
        S[..., 0, 0] = amp * ct
        S[..., 0, 1] = -amp * st
        S[..., 1, 0] = amp * st
        S[..., 1, 1] = amp * ct
    elif spec.kind == "custom_table":
        S = _table_interp(spec.table, np.broadcast_to(x, shape), n_val, c_val)
        # tables are clamped to the declared bound rather than rejected
        fro = np.sqrt(np.sum(S * S, axis=(-2, -1)))
        over = fro > spec.C_S
        if np.any(over):
            scale = np.ones(shape)
            scale[over] = spec.C_S / fro[over]
            S = S * scale[..., None, None]

    if spec.eta > 0.0:
        if domain is None:
            raise SensitivityError("cutoff eta > 0 needs the domain")
        S = S * cutoff_values(domain, spec.eta, x, y)[..., None, None]

    fro_max = float(np.sqrt(np.max(np.sum(S * S, axis=(-2, -1)))))
    if fro_max > spec.C_S * (1.0 + 1e-9):
        raise SensitivityError(
            f"tensor norm {fro_max} exceeds declared bound C_S={spec.C_S}"
        )
    return S
