"""Shared fixtures: small grids, a default parameter block with frozen
eigenvalue inputs, and cheap initial states for the dynamics tests."""

import numpy as np
import pytest

from ctns import (
    RectDomain,
    ScalarField,
    SensitivitySpec,
    SystemState,
    VectorField,
    build_grid,
    default_parameters,
    lambda1_neumann,
)

# fine-grid Richardson reference for the principal Stokes eigenvalue of
# the unit square (64/128 and 96/192 extrapolations agree to 2e-5)
LAMBDA1_PRIME_UNIT_SQUARE = 52.34469


@pytest.fixture(scope="session")
def unit32():
    return build_grid(1.0, 1.0, 32, 32)


@pytest.fixture(scope="session")
def unit48():
    return build_grid(1.0, 1.0, 48, 48)


@pytest.fixture(scope="session")
def rect_2x1():
    return build_grid(2.0, 1.0, 64, 32)


def make_params(domain, m=1.0, C_S=1.0, grad_phi_inf=1.0):
    return default_parameters(
        lambda1=lambda1_neumann(domain),
        lambda1_prime=LAMBDA1_PRIME_UNIT_SQUARE,
        volume=domain.volume,
        m=m,
        C_S=C_S,
        grad_phi_inf=grad_phi_inf,
    )


@pytest.fixture(scope="session")
def params32(unit32):
    return make_params(unit32)


def cosine_state(domain, m=1.0, amp_n=1e-3, amp_c=1e-3, amp_u=0.0, t=0.0):
    """Smooth compatible initial data: cosine density bump, one-signed
    oxygen profile, and (optionally) a solenoidal no-slip corner vortex."""
    x, y = domain.cell_centers()
    n = ScalarField(
        domain,
        m + amp_n * np.cos(np.pi * x / domain.Lx) * np.cos(np.pi * y / domain.Ly),
    )
    c = ScalarField(domain, amp_c * 0.5 * (1.0 + np.cos(np.pi * y / domain.Ly)))
    u = stream_velocity(domain, amp_u) if amp_u else VectorField.zeros(domain)
    return SystemState(n=n, c=c, u=u, t=t)


def stream_velocity(domain, amp):
    """u = curl psi for psi = amp sin^2(pi x/Lx) sin^2(pi y/Ly), taken as
    exact discrete differences so the staggered divergence vanishes."""

    def psi(x, y):
        return amp * np.sin(np.pi * x / domain.Lx) ** 2 * np.sin(np.pi * y / domain.Ly) ** 2

    h = domain.h
    xg = np.arange(domain.nx + 1) * h
    yg = np.arange(domain.ny + 1) * h
    Xg, Yg = np.meshgrid(xg, yg, indexing="ij")
    psi_nodes = psi(Xg, Yg)
    ux = (psi_nodes[:, 1:] - psi_nodes[:, :-1]) / h
    uy = -(psi_nodes[1:, :] - psi_nodes[:-1, :]) / h
    v = VectorField(domain, ux, uy)
    v.enforce_noslip()
    return v


def rotation_spec(chi=0.1, theta=0.6, C_S=0.2, eta=0.0):
    return SensitivitySpec(kind="rotation", chi=chi, theta=theta, C_S=C_S, eta=eta)
