"""Stencil identities, conservation, and accuracy of the spatial operators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctns import (
    GridError,
    ScalarField,
    SensitivitySpec,
    VectorField,
    advect_scalar,
    build_grid,
    chemo_flux_div,
    divergence,
    grad_to_faces,
    laplacian_neumann,
)
from ctns.operators import grad_centered, grad_inf_norm, velocity_gradient_sq

from conftest import rotation_spec, stream_velocity


def rand_field(domain, seed):
    rng = np.random.default_rng(seed)
    return ScalarField(domain, rng.standard_normal((domain.nx, domain.ny)))


def test_laplacian_of_constant_is_zero():
    d = build_grid(1.0, 1.0, 16, 16)
    out = laplacian_neumann(ScalarField.constant(d, 4.2))
    assert np.all(out.values == 0.0)


def test_laplacian_cosine_exact_discrete_eigenvalue():
    # cos(k pi x / L) at cell centers is an exact eigenvector of the
    # reflected 5-point stencil with eigenvalue -(4/h^2) sin^2(k pi / 2n)
    d = build_grid(1.0, 1.0, 24, 24)
    for k in (1, 3, 7):
        f = ScalarField.from_function(d, lambda x, y: np.cos(k * np.pi * x))
        lam = (4.0 / d.h**2) * np.sin(k * np.pi / (2 * d.nx)) ** 2
        assert np.allclose(laplacian_neumann(f).values, -lam * f.values, atol=1e-10)


def test_laplacian_second_order_in_h():
    errs = []
    for n in (32, 64, 128):
        d = build_grid(1.0, 1.0, n, n)
        f = ScalarField.from_function(d, lambda x, y: np.cos(np.pi * x) * np.cos(2 * np.pi * y))
        exact = ScalarField.from_function(
            d, lambda x, y: -(np.pi**2 + 4 * np.pi**2) * np.cos(np.pi * x) * np.cos(2 * np.pi * y)
        )
        errs.append(np.max(np.abs(laplacian_neumann(f).values - exact.values)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.1)


@given(seed=st.integers(0, 200))
@settings(max_examples=20, deadline=None)
def test_laplacian_conserves_mass_and_is_dissipative(seed):
    d = build_grid(1.0, 1.0, 12, 12)
    f = rand_field(d, seed)
    lap = laplacian_neumann(f)
    assert abs(lap.values.sum()) < 1e-10 * max(1.0, np.abs(f.values).sum())
    assert float((lap.values * f.values).sum()) <= 1e-12


@given(s1=st.integers(0, 100), s2=st.integers(0, 100))
@settings(max_examples=15, deadline=None)
def test_laplacian_self_adjoint(s1, s2):
    d = build_grid(1.0, 1.0, 12, 12)
    f, g = rand_field(d, s1), rand_field(d, s2)
    a = float((laplacian_neumann(f).values * g.values).sum())
    b = float((f.values * laplacian_neumann(g).values).sum())
    assert a == pytest.approx(b, abs=1e-10)


def test_div_grad_is_laplacian_bitwise():
    d = build_grid(1.0, 1.0, 16, 16)
    f = rand_field(d, 7)
    a = divergence(grad_to_faces(f, mode="neumann")).values
    b = laplacian_neumann(f).values
    assert np.array_equal(a, b)


def test_onesided_gradient_exact_for_linear_fields():
    d = build_grid(1.0, 1.0, 16, 16)
    f = ScalarField.from_function(d, lambda x, y: 3.0 * x - 2.0 * y)
    g = grad_to_faces(f, mode="onesided")
    assert np.allclose(g.ux, 3.0, atol=1e-12)
    assert np.allclose(g.uy, -2.0, atol=1e-12)


def test_grad_unknown_mode_rejected():
    d = build_grid(1.0, 1.0, 8, 8)
    with pytest.raises(GridError):
        grad_to_faces(ScalarField.zeros(d), mode="central")


def test_advect_requires_solenoidal_velocity():
    d = build_grid(1.0, 1.0, 16, 16)
    v = VectorField.zeros(d)
    v.ux[5, 5] = 1.0  # a single face makes div u = O(1/h)
    with pytest.raises(GridError):
        advect_scalar(v, ScalarField.constant(d, 1.0))


def test_advect_kappa_range_checked():
    d = build_grid(1.0, 1.0, 8, 8)
    with pytest.raises(GridError):
        advect_scalar(VectorField.zeros(d), ScalarField.zeros(d), kappa=1.5)


@pytest.mark.parametrize("kappa", [0.0, 0.5, 0.9, 1.0])
def test_advect_conserves_mass_and_kills_constants(kappa):
    d = build_grid(1.0, 1.0, 32, 32)
    u = stream_velocity(d, 1.0)
    f = ScalarField.from_function(d, lambda x, y: 1.0 + 0.3 * np.sin(4 * x + y))
    out = advect_scalar(u, f, kappa=kappa)
    assert abs(out.values.sum()) < 1e-10
    const = advect_scalar(u, ScalarField.constant(d, 2.0), kappa=kappa)
    assert np.max(np.abs(const.values)) < 1e-11


def test_chemo_flux_zero_when_c_constant():
    d = build_grid(1.0, 1.0, 16, 16)
    n = ScalarField.from_function(d, lambda x, y: 1.0 + 0.5 * x * y)
    out = chemo_flux_div(n, ScalarField.constant(d, 2.0), rotation_spec())
    assert np.max(np.abs(out.values)) == 0.0


def test_chemo_flux_zero_for_zero_sensitivity():
    d = build_grid(1.0, 1.0, 16, 16)
    n = ScalarField.constant(d, 1.0)
    c = ScalarField.from_function(d, lambda x, y: 1.0 + np.cos(np.pi * y))
    out = chemo_flux_div(n, c, SensitivitySpec(kind="zero"))
    assert np.max(np.abs(out.values)) == 0.0


@given(seed=st.integers(0, 100))
@settings(max_examples=15, deadline=None)
def test_chemo_flux_conserves_mass(seed):
    d = build_grid(1.0, 1.0, 16, 16)
    rng = np.random.default_rng(seed)
    n = ScalarField(d, 1.0 + 0.1 * rng.standard_normal((16, 16)))
    c = ScalarField(d, 1.0 + 0.3 * rng.standard_normal((16, 16)).clip(-2, 2))
    out = chemo_flux_div(n, c, rotation_spec(chi=0.5, C_S=1.0))
    assert abs(out.values.sum()) < 1e-10


def test_chemo_scalar_kind_matches_laplacian_identity():
    # with S = chi * Id and n = 1 the flux divergence is chi * Lap c up to
    # the tangential-average cross terms, which vanish for S diagonal
    d = build_grid(1.0, 1.0, 32, 32)
    c = ScalarField.from_function(d, lambda x, y: 1.0 + np.cos(np.pi * x) * np.cos(np.pi * y))
    spec = SensitivitySpec(kind="scalar_chi", chi=0.7, C_S=1.0)
    out = chemo_flux_div(ScalarField.constant(d, 1.0), c, spec)
    ref = laplacian_neumann(c)
    assert np.allclose(out.values, 0.7 * ref.values, atol=1e-12)


def test_grad_centered_linear_interior():
    d = build_grid(1.0, 1.0, 16, 16)
    f = ScalarField.from_function(d, lambda x, y: 2.0 * x + 3.0 * y)
    gx, gy = grad_centered(f)
    # interior cells see the exact slope; boundary cells are halved by the
    # reflected ghost
    assert np.allclose(gx[1:-1, :], 2.0, atol=1e-12)
    assert np.allclose(gy[:, 1:-1], 3.0, atol=1e-12)
    assert grad_inf_norm(f) == pytest.approx(np.hypot(2.0, 3.0), rel=1e-12)


def test_velocity_gradient_sq_zero_field():
    d = build_grid(1.0, 1.0, 16, 16)
    assert np.all(velocity_gradient_sq(VectorField.zeros(d)) == 0.0)


def test_velocity_gradient_sq_nonnegative():
    d = build_grid(1.0, 1.0, 16, 16)
    g = velocity_gradient_sq(stream_velocity(d, 1.0))
    assert g.shape == (16, 16)
    assert np.all(g >= 0.0)
    assert g.max() > 0.0
