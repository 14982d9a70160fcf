"""Shared initial data for the demo scripts: a cosine density bump over a
uniform background, a one-signed oxygen profile, and an optional
solenoidal corner vortex built as the exact discrete curl of a stream
function (so the staggered divergence vanishes to round-off)."""

import numpy as np

from ctns import ScalarField, SystemState, VectorField


def stream_velocity(domain, amp):
    def psi(x, y):
        return (amp * np.sin(np.pi * x / domain.Lx) ** 2
                * np.sin(np.pi * y / domain.Ly) ** 2)

    h = domain.h
    xn = np.linspace(0.0, domain.Lx, domain.nx + 1)
    yn = np.linspace(0.0, domain.Ly, domain.ny + 1)
    X, Y = np.meshgrid(xn, yn, indexing="ij")
    P = psi(X, Y)
    ux = (P[:, 1:] - P[:, :-1]) / h
    uy = -(P[1:, :] - P[:-1, :]) / h
    u = VectorField(domain, ux, uy)
    u.enforce_noslip()
    return u


def cosine_state(domain, m=1.0, amp_n=1e-3, amp_c=1e-3, amp_u=0.0):
    x, y = domain.cell_centers()
    n = ScalarField(domain, m + amp_n * np.cos(np.pi * x / domain.Lx)
                    * np.cos(np.pi * y / domain.Ly))
    c = ScalarField(domain, amp_c * 0.5 * (1.0 + np.cos(np.pi * y / domain.Ly)))
    u = stream_velocity(domain, amp_u) if amp_u else VectorField.zeros(domain)
    return SystemState(n=n, c=c, u=u, t=0.0)
