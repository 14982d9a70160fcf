"""Finite-volume operators on the staggered rectangular grid.

Cell-centered scalars carry reflection (homogeneous Neumann) boundary
conditions; fluxes live on faces.  Divergence is the exact adjoint of the
face gradient, so conservation statements hold to round-off, and the
five-point Neumann Laplacian is literally divergence(grad_to_faces(f)).
"""

from __future__ import annotations

import numpy as np

from .grid import DIV_TOL, GridError, RectDomain, ScalarField, VectorField
from .sensitivity import SensitivitySpec, eval_tensor

__all__ = [
    "grad_to_faces",
    "divergence",
    "laplacian_neumann",
    "advect_scalar",
    "chemo_flux_div",
    "grad_centered",
    "grad_inf_norm",
    "velocity_gradient_sq",
]


def grad_to_faces(f: ScalarField, mode: str = "neumann") -> VectorField:
    """Face-normal differences of a cell-centered scalar.

    mode="neumann": boundary faces get zero (reflection ghost cells).
    mode="onesided": boundary faces copy the adjacent interior face, which
    is exact for fields linear in the normal coordinate.
    """
    d = f.domain
    h = d.h
    v = f.values
    gx = np.zeros((d.nx + 1, d.ny))
    gy = np.zeros((d.nx, d.ny + 1))
    gx[1:-1, :] = (v[1:, :] - v[:-1, :]) / h
    gy[:, 1:-1] = (v[:, 1:] - v[:, :-1]) / h
    if mode == "onesided":
        gx[0, :] = gx[1, :]
        gx[-1, :] = gx[-2, :]
        gy[:, 0] = gy[:, 1]
        gy[:, -1] = gy[:, -2]
    elif mode != "neumann":
        raise GridError(f"unknown gradient mode {mode!r}")
    return VectorField(d, gx, gy)


def divergence(v: VectorField) -> ScalarField:
    d = v.domain
    h = d.h
    out = (v.ux[1:, :] - v.ux[:-1, :]) / h + (v.uy[:, 1:] - v.uy[:, :-1]) / h
    return ScalarField(d, out)


def laplacian_neumann(f: ScalarField) -> ScalarField:
    # composition keeps the stencil identity with divergence/grad exact
    return divergence(grad_to_faces(f, mode="neumann"))


def _check_solenoidal(u: VectorField) -> None:
    div = divergence(u).values
    tol = DIV_TOL * max(1.0, u.max_speed())
    worst = float(np.max(np.abs(div)))
    if worst > tol:
        raise GridError(f"advecting velocity is not solenoidal: max|div u| = {worst}")


def advect_scalar(u: VectorField, f: ScalarField, kappa: float = 0.9) -> ScalarField:
    """Conservative divergence of the advective flux f*u.

    Face values of f blend a centered average (weight kappa) with pure
    upwinding.  Boundary fluxes use the adjacent cell value, so they vanish
    for no-slip velocities and the result always sums to the boundary flux.
    """
    if not 0.0 <= kappa <= 1.0:
        raise GridError("advection blend kappa must lie in [0, 1]")
    _check_solenoidal(u)
    d = f.domain
    h = d.h
    v = f.values

    Fx = np.zeros((d.nx + 1, d.ny))
    uf = u.ux[1:-1, :]
    fc = 0.5 * (v[:-1, :] + v[1:, :])
    fup = np.where(uf > 0.0, v[:-1, :], v[1:, :])
    Fx[1:-1, :] = uf * (kappa * fc + (1.0 - kappa) * fup)
    Fx[0, :] = u.ux[0, :] * v[0, :]
    Fx[-1, :] = u.ux[-1, :] * v[-1, :]

    Fy = np.zeros((d.nx, d.ny + 1))
    vf = u.uy[:, 1:-1]
    fc = 0.5 * (v[:, :-1] + v[:, 1:])
    fup = np.where(vf > 0.0, v[:, :-1], v[:, 1:])
    Fy[:, 1:-1] = vf * (kappa * fc + (1.0 - kappa) * fup)
    Fy[:, 0] = u.uy[:, 0] * v[:, 0]
    Fy[:, -1] = u.uy[:, -1] * v[:, -1]

    return ScalarField(d, (Fx[1:, :] - Fx[:-1, :]) / h + (Fy[:, 1:] - Fy[:, :-1]) / h)


def _dcdy_at_centers(c: np.ndarray, h: float) -> np.ndarray:
    cp = np.pad(c, ((0, 0), (1, 1)), mode="edge")
    return (cp[:, 2:] - cp[:, :-2]) / (2.0 * h)


def _dcdx_at_centers(c: np.ndarray, h: float) -> np.ndarray:
    cp = np.pad(c, ((1, 1), (0, 0)), mode="edge")
    return (cp[2:, :] - cp[:-2, :]) / (2.0 * h)


def chemo_flux_div(n: ScalarField, c: ScalarField, spec: SensitivitySpec) -> ScalarField:
    """div( n S(x, n, c) grad c ) in conservative face-flux form.

    The full tensor flux is assembled at face midpoints: the face-normal
    derivative is the two-point difference, the tangential derivative an
    average of centered cell derivatives, and n, c arithmetic face means.
    All boundary fluxes are zero (no-flux walls), so the total cell mass
    produced sums to zero exactly.
    """
    d = n.domain
    h = d.h
    nv, cv = n.values, c.values

    # x-faces, interior
    xf, yf = d.xface_centers()
    dcdx = (cv[1:, :] - cv[:-1, :]) / h
    dcdy_c = _dcdy_at_centers(cv, h)
    dcdy = 0.5 * (dcdy_c[:-1, :] + dcdy_c[1:, :])
    n_face = 0.5 * (nv[:-1, :] + nv[1:, :])
    c_face = 0.5 * (cv[:-1, :] + cv[1:, :])
    S = eval_tensor(spec, xf[1:-1, :], yf[1:-1, :], n_face, c_face, domain=d)
    Fx = np.zeros((d.nx + 1, d.ny))
    Fx[1:-1, :] = n_face * (S[..., 0, 0] * dcdx + S[..., 0, 1] * dcdy)

    # y-faces, interior
    xg, yg = d.yface_centers()
    dcdy = (cv[:, 1:] - cv[:, :-1]) / h
    dcdx_c = _dcdx_at_centers(cv, h)
    dcdx = 0.5 * (dcdx_c[:, :-1] + dcdx_c[:, 1:])
    n_face = 0.5 * (nv[:, :-1] + nv[:, 1:])
    c_face = 0.5 * (cv[:, :-1] + cv[:, 1:])
    S = eval_tensor(spec, xg[:, 1:-1], yg[:, 1:-1], n_face, c_face, domain=d)
    Fy = np.zeros((d.nx, d.ny + 1))
    Fy[:, 1:-1] = n_face * (S[..., 1, 0] * dcdx + S[..., 1, 1] * dcdy)

    return ScalarField(d, (Fx[1:, :] - Fx[:-1, :]) / h + (Fy[:, 1:] - Fy[:, :-1]) / h)


def grad_centered(f: ScalarField) -> tuple[np.ndarray, np.ndarray]:
    """Cell-centered gradient components by averaging interior face gradients."""
    g = grad_to_faces(f, mode="neumann")
    gx = 0.5 * (g.ux[:-1, :] + g.ux[1:, :])
    gy = 0.5 * (g.uy[:, :-1] + g.uy[:, 1:])
    return gx, gy


def grad_inf_norm(f: ScalarField) -> float:
    """Max cell-centered gradient magnitude (used for drift CFL checks)."""
    gx, gy = grad_centered(f)
    return float(np.max(np.hypot(gx, gy)))


def velocity_gradient_sq(u: VectorField) -> np.ndarray:
    """|grad u|^2 (Frobenius) at cell centers; no-slip ghost reflection in y/x."""
    d = u.domain
    h = d.h
    dudx = (u.ux[1:, :] - u.ux[:-1, :]) / h
    dvdy = (u.uy[:, 1:] - u.uy[:, :-1]) / h
    # tangential derivatives: pad with odd (no-slip) ghosts, difference to
    # corners, then average the four surrounding corner values to the center
    uxp = np.pad(u.ux, ((0, 0), (1, 1)), mode="reflect")
    uxp[:, 0] = -u.ux[:, 0]
    uxp[:, -1] = -u.ux[:, -1]
    dudy_corner = (uxp[:, 1:] - uxp[:, :-1]) / h  # (nx+1, ny+1)
    dudy = 0.25 * (
        dudy_corner[:-1, :-1] + dudy_corner[1:, :-1] + dudy_corner[:-1, 1:] + dudy_corner[1:, 1:]
    )
    uyp = np.pad(u.uy, ((1, 1), (0, 0)), mode="reflect")
    uyp[0, :] = -u.uy[0, :]
    uyp[-1, :] = -u.uy[-1, :]
    dvdx_corner = (uyp[1:, :] - uyp[:-1, :]) / h
    dvdx = 0.25 * (
        dvdx_corner[:-1, :-1] + dvdx_corner[1:, :-1] + dvdx_corner[:-1, 1:] + dvdx_corner[1:, 1:]
    )
    return dudx * dudx + dvdy * dvdy + dudy * dudy + dvdx * dvdx
