"""Incompressible velocity machinery: Helmholtz projection, buoyancy,
momentum stepping, and the principal Stokes eigenvalue on the staggered
grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .grid import GridError, RectDomain, ScalarField, SystemState, VectorField
from .operators import divergence, grad_to_faces
from .spectral import solve_poisson_neumann, velocity_heat_semigroup

__all__ = [
    "helmholtz_project",
    "buoyancy_force",
    "advect_velocity",
    "ns_step",
    "StokesEig",
    "stokes_lambda1",
]


def helmholtz_project(v: VectorField) -> VectorField:
    """Projection onto discretely divergence-free fields.

    Solves Lap(phi) = div v with reflection walls and subtracts grad phi.
    Boundary-normal faces are untouched (grad phi vanishes there), so a
    no-slip input stays no-slip and the output divergence is round-off.
    """
    phi = solve_poisson_neumann(divergence(v))
    g = grad_to_faces(phi, mode="neumann")
    return VectorField(v.domain, v.ux - g.ux, v.uy - g.uy)


def buoyancy_force(n: ScalarField, phi: ScalarField) -> VectorField:
    """n * grad(Phi) sampled on faces (n by arithmetic face means).

    grad(Phi) uses the reflection-mode face gradient, so a spatially
    constant n produces a pure gradient that the projection removes
    exactly.
    """
    d = n.domain
    g = grad_to_faces(phi, mode="neumann")
    nv = n.values
    fx = np.zeros_like(g.ux)
    fx[1:-1, :] = 0.5 * (nv[:-1, :] + nv[1:, :]) * g.ux[1:-1, :]
    fy = np.zeros_like(g.uy)
    fy[:, 1:-1] = 0.5 * (nv[:, :-1] + nv[:, 1:]) * g.uy[:, 1:-1]
    return VectorField(d, fx, fy)


def advect_velocity(u: VectorField) -> VectorField:
    """(u . grad) u in conservative form on the staggered grid.

    Component fluxes are built from centered averages at cell centers and
    cell corners; corner tangential velocities use odd (no-slip) ghosts.
    Boundary-normal faces receive zero tendency.
    """
    d = u.domain
    h = d.h

    # ux tendency on interior x-faces
    uc = 0.5 * (u.ux[:-1, :] + u.ux[1:, :])          # ux at centers (nx, ny)
    Fxx = uc * uc
    uxp = np.pad(u.ux, ((0, 0), (1, 1)))
    uxp[:, 0] = -u.ux[:, 0]
    uxp[:, -1] = -u.ux[:, -1]
    ux_corner = 0.5 * (uxp[:, :-1] + uxp[:, 1:])      # (nx+1, ny+1)
    uy_corner = np.zeros((d.nx + 1, d.ny + 1))
    uy_corner[1:-1, :] = 0.5 * (u.uy[:-1, :] + u.uy[1:, :])
    Fxy = uy_corner * ux_corner
    ax = np.zeros_like(u.ux)
    ax[1:-1, :] = (Fxx[1:, :] - Fxx[:-1, :]) / h + (Fxy[1:-1, 1:] - Fxy[1:-1, :-1]) / h

    # uy tendency on interior y-faces
    vc = 0.5 * (u.uy[:, :-1] + u.uy[:, 1:])           # uy at centers (nx, ny)
    Fyy = vc * vc
    uyp = np.pad(u.uy, ((1, 1), (0, 0)))
    uyp[0, :] = -u.uy[0, :]
    uyp[-1, :] = -u.uy[-1, :]
    uy_c2 = 0.5 * (uyp[:-1, :] + uyp[1:, :])          # (nx+1, ny+1)
    ux_c2 = np.zeros((d.nx + 1, d.ny + 1))
    ux_c2[:, 1:-1] = 0.5 * (u.ux[:, :-1] + u.ux[:, 1:])
    Fyx = ux_c2 * uy_c2
    ay = np.zeros_like(u.uy)
    ay[:, 1:-1] = (Fyy[:, 1:] - Fyy[:, :-1]) / h + (Fyx[1:, 1:-1] - Fyx[:-1, 1:-1]) / h

    return VectorField(d, ax, ay)


def ns_step(
    state: SystemState,
    phi: ScalarField,
    dt: float,
    advect: bool = True,
) -> VectorField:
    """One momentum sub-step of size dt.

    Explicit advection and projected buoyancy, then the exact viscous
    semigroup, then a final projection (the semigroup does not commute
    with the projection on the staggered grid).  Setting advect=False
    gives the Stokes regime.
    """
    u = state.u
    d = u.domain
    if dt <= 0:
        raise GridError("dt must be positive")
    if advect and u.max_speed() * dt > d.h:
        raise GridError("advective CFL violated in the momentum step")
    tend_x = np.zeros_like(u.ux)
    tend_y = np.zeros_like(u.uy)
    if advect:
        adv = advect_velocity(u)
        tend_x -= adv.ux
        tend_y -= adv.uy
    force = helmholtz_project(buoyancy_force(state.n, phi))
    w = VectorField(d, u.ux + dt * (tend_x + force.ux), u.uy + dt * (tend_y + force.uy))
    w = helmholtz_project(w)
    w = velocity_heat_semigroup(w, dt)
    w.enforce_noslip()
    return helmholtz_project(w)


@dataclass
class StokesEig:
    """Principal Stokes eigenvalue with its eigenfield and residual."""

    lambda1_prime: float
    eigenfield: VectorField
    residual: float


def _lap1d_dirichlet(m: int, h: float) -> sp.csr_matrix:
    """1D minus-Laplacian on m interior nodes, zero endpoint values."""
    e = np.ones(m)
    return sp.diags([-e[:-1], 2 * e, -e[:-1]], [-1, 0, 1]).tocsr() / h**2


def _lap1d_halfsample(m: int, h: float) -> sp.csr_matrix:
    """1D minus-Laplacian on m cell samples, odd ghost at both walls."""
    e = np.ones(m)
    A = sp.diags([-e[:-1], 2 * e, -e[:-1]], [-1, 0, 1]).tolil()
    A[0, 0] = 3.0
    A[-1, -1] = 3.0
    return (A / h**2).tocsr()


def stokes_lambda1(domain: RectDomain, tol: float = 1e-12, maxiter: int = 500) -> StokesEig:
    """Principal eigenvalue of the Stokes operator with no-slip walls.

    Assembles the staggered saddle system (vector Laplacian, pressure
    gradient, divergence), pins one pressure value, factorizes once, and
    runs inverse power iteration with a Rayleigh-quotient estimate.
    """
    if min(domain.nx, domain.ny) < 32:
        raise GridError("Stokes eigenvalue needs at least 32 cells per side")
    nx, ny, h = domain.nx, domain.ny, domain.h
    nux = (nx - 1) * ny
    nuy = nx * (ny - 1)
    npc = nx * ny

    A_ux = sp.kron(_lap1d_dirichlet(nx - 1, h), sp.identity(ny)) + sp.kron(
        sp.identity(nx - 1), _lap1d_halfsample(ny, h)
    )
    A_uy = sp.kron(_lap1d_halfsample(nx, h), sp.identity(ny - 1)) + sp.kron(
        sp.identity(nx), _lap1d_dirichlet(ny - 1, h)
    )

    # pressure gradient onto interior faces; D = -G^T is the divergence
    d1x = sp.diags([-np.ones(nx - 1), np.ones(nx - 1)], [0, 1], shape=(nx - 1, nx)) / h
    d1y = sp.diags([-np.ones(ny - 1), np.ones(ny - 1)], [0, 1], shape=(ny - 1, ny)) / h
    Gx = sp.kron(d1x, sp.identity(ny))
    Gy = sp.kron(sp.identity(nx), d1y)

    K = sp.bmat(
        [
            [A_ux, None, Gx],
            [None, A_uy, Gy],
            [-Gx.T, -Gy.T, None],
        ],
        format="lil",
    )
    row = nux + nuy  # pin the first pressure cell
    K.rows[row] = [row]
    K.data[row] = [1.0]
    lu = splu(K.tocsc())

    rng = np.random.default_rng(0)
    v = rng.standard_normal(nux + nuy)
    v /= np.linalg.norm(v)
    lam = 0.0
    residual = np.inf
    for _ in range(maxiter):
        sol = lu.solve(np.concatenate([v, np.zeros(npc)]))
        w = sol[: nux + nuy]
        lam = float(v @ w / (w @ w))
        # with K [w; p] = [v; 0] we have A w + G p = v and div w = 0, so
        # ||v - lam*w|| / ||w|| is the eigen-defect of the normalized w
        residual = float(np.linalg.norm(v - lam * w) / np.linalg.norm(w))
        v = w / np.linalg.norm(w)
        if residual <= max(tol * lam, 1e-10):
            break

    ux = np.zeros((nx + 1, ny))
    ux[1:-1, :] = v[:nux].reshape(nx - 1, ny)
    uy = np.zeros((nx, ny + 1))
    uy[:, 1:-1] = v[nux:].reshape(nx, ny - 1)
    field = VectorField(domain, ux, uy)
    amp = field.l2_norm()
    if amp > 0:
        field = VectorField(domain, ux / amp, uy / amp)
    return StokesEig(lam, field, residual)
