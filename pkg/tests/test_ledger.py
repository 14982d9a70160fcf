"""Scalar certificate machinery: parameter validation, the integral
constants, certificate selection, and initial-data smallness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from ctns import (
    Certificate,
    LedgerError,
    ParameterSet,
    ScalarField,
    VectorField,
    build_grid,
    check_initial_smallness,
    choose_M_eps,
    choose_M_eps_alternative,
    compute_C1_to_C7,
    default_parameters,
    lemma24_sup_ratio,
    scalar_inequality_suite,
    sigma,
    sigma_integral,
)

from conftest import cosine_state, stream_velocity

LAM1 = math.pi**2
LAM1P = 52.34469

# frozen regression values for the analytic parameter block
# (m=1, p0=1.5, q0=3, beta=0.75, rates at 80%, unit square)
C_FROZEN = (0.065835, 3.459094, 0.304981, 8.335062, 1.229204, 8.341453, 11.541176)
SIGMA_FROZEN = 4.135799055818777
EPS_FROZEN = 7.87634810686337e-06


def analytic_params(**kw):
    return default_parameters(lambda1=LAM1, lambda1_prime=LAM1P, **kw)


# ---------------------------------------------------------------------------
# parameter validation


def test_default_parameters_block():
    p = analytic_params()
    assert p.p0 == 1.5 and p.q0 == 3.0 and p.q1 == 3.0 and p.beta == 0.75
    assert p.alpha1 == pytest.approx(0.8)
    assert p.alpha2 == pytest.approx(0.64)
    assert p.alpha2 < p.mu < p.lambda1_prime
    assert all(p.k[f"k{i}"] == 1.0 for i in range(1, 10))
    assert all(v == "default" for v in p.k_provenance.values())


@pytest.mark.parametrize(
    "patch",
    [
        {"m": -1.0},
        {"p0": 0.9},       # <= N/2
        {"p0": 2.0},       # >= N
        {"q0": 1.5},       # <= N
        {"q0": 20.0},      # violates 1/q0 > 1/p0 - 1/N at p0 = 1.8
        {"beta": 0.4},     # <= N/4
        {"beta": 1.0},
        {"alpha1": 1.5},   # >= min(m, lambda1) with m = 1
        {"alpha2": 0.9},   # >= alpha1
        {"mu": 0.1},       # <= alpha2
        {"mu": 100.0},     # >= lambda1'
        {"volume": 0.0},
    ],
)
def test_validation_rejects_each_constraint(patch):
    base = dict(
        m=1.0, p0=1.5, q0=3.0, beta=0.75, alpha1=0.8, alpha2=0.64, mu=10.0,
        C_S=1.0, grad_phi_inf=1.0, volume=1.0, lambda1=LAM1, lambda1_prime=LAM1P,
    )
    if "q0" in patch and patch["q0"] == 20.0:
        base["p0"] = 1.8
    base.update(patch)
    with pytest.raises(LedgerError):
        ParameterSet(**base)


def test_validation_requires_all_k():
    base = analytic_params()
    k = dict(base.k)
    del k["k5"]
    with pytest.raises(LedgerError):
        ParameterSet(
            m=1.0, p0=1.5, q0=3.0, beta=0.75, alpha1=0.8, alpha2=0.64, mu=10.0,
            C_S=1.0, grad_phi_inf=1.0, volume=1.0, lambda1=LAM1,
            lambda1_prime=LAM1P, k=k,
        )


# ---------------------------------------------------------------------------
# sigma and the convolution constants


def test_sigma_integral_half_exponent_closed_form():
    # a = 1/2, rate 1: integral = 1 + Gamma(1/2) = 1 + sqrt(pi)
    assert sigma_integral(0.5, 1.0) == pytest.approx(1.0 + math.sqrt(math.pi), rel=1e-10)


@given(a=st.floats(0.05, 0.95), al=st.floats(0.05, 20.0))
@settings(max_examples=40, deadline=None)
def test_sigma_integral_matches_gamma_formula(a, al):
    expected = 1.0 / al + gamma_fn(1.0 - a) * al ** (a - 1.0)
    assert sigma_integral(a, al) == pytest.approx(expected, rel=1e-8)


def test_sigma_integral_domain_checks():
    with pytest.raises(LedgerError):
        sigma_integral(1.5, 1.0)
    with pytest.raises(LedgerError):
        sigma_integral(0.5, 0.0)


def test_sigma_decreasing_in_rate_and_frozen_value():
    p = analytic_params()
    assert sigma(p) == pytest.approx(SIGMA_FROZEN, rel=1e-10)
    assert sigma(p, alpha1=0.4) > sigma(p) > sigma(p, alpha1=2.0)


def test_lemma24_hypothesis_checks():
    with pytest.raises(LedgerError):
        lemma24_sup_ratio(0.95, 0.5, 1.0, 2.0, eta=0.1)  # alpha > 1 - eta
    with pytest.raises(LedgerError):
        lemma24_sup_ratio(0.5, 0.05, 1.0, 2.0, eta=0.1)  # beta < eta
    with pytest.raises(LedgerError):
        lemma24_sup_ratio(0.5, 0.5, 1.0, 1.05, eta=0.1)  # |gamma-delta| < eta
    with pytest.raises(LedgerError):
        lemma24_sup_ratio(0.5, 0.5, 1.0, 2.0, eta=0.0)


def test_lemma24_exchange_symmetry_exact():
    t_grid = np.geomspace(1e-3, 50.0, 80)
    a = lemma24_sup_ratio(0.3, 0.6, 0.7, 2.1, eta=0.1, t_grid=t_grid)
    b = lemma24_sup_ratio(0.6, 0.3, 2.1, 0.7, eta=0.1, t_grid=t_grid)
    assert a > 0.0
    assert a == b  # canonicalized integration order makes this bitwise


def test_lemma24_stable_under_grid_refinement():
    coarse = lemma24_sup_ratio(0.4, 0.5, 1.0, 3.0, eta=0.1,
                               t_grid=np.geomspace(1e-4, 1e2, 200))
    fine = lemma24_sup_ratio(0.4, 0.5, 1.0, 3.0, eta=0.1,
                             t_grid=np.geomspace(1e-4, 1e2, 800))
    assert fine == pytest.approx(coarse, rel=2e-2)


def test_convolution_constants_frozen_and_stable():
    p = analytic_params()
    C = compute_C1_to_C7(p)
    assert all(c > 0 for c in C)
    for got, ref in zip(C, C_FROZEN):
        assert got == pytest.approx(ref, rel=1e-4)
    C2 = compute_C1_to_C7(p, refine=2)
    for a, b in zip(C, C2):
        assert b == pytest.approx(a, rel=2e-2)


# ---------------------------------------------------------------------------
# certificate selection


def test_choose_M_eps_frozen_and_consistent():
    p = analytic_params()
    cert = choose_M_eps(p)
    assert cert.eps == pytest.approx(EPS_FROZEN, rel=1e-6)
    assert min(cert.slacks) > 0.0
    assert cert.m0 is None
    assert all(M > 0 for M in (cert.M1, cert.M2, cert.M3, cert.M4))
    # serialization carries the full parameter fingerprint
    doc = cert.to_dict(p)
    for key in ("m", "p0", "q0", "beta", "alpha1", "alpha2", "mu",
                "M1", "M2", "M3", "M4", "eps", "A", "slacks", "k_provenance"):
        assert key in doc


def test_choose_M_eps_shrinks_with_larger_constants():
    p = analytic_params()
    big = analytic_params(k={f"k{i}": 10.0 for i in range(1, 10)})
    assert choose_M_eps(big).eps < choose_M_eps(p).eps


def test_choose_M_eps_small_mass():
    p = default_parameters(lambda1=LAM1, lambda1_prime=LAM1P, m=0.1)
    cert = choose_M_eps(p)
    assert cert.eps > 0 and min(cert.slacks) > 0


def test_alternative_certificate_mass_threshold():
    p = analytic_params()
    cert = choose_M_eps_alternative(p, M_c0=1.0)
    assert cert.m0 is not None
    assert cert.m0 < cert.eps * p.volume ** (-1.0 / p.p0)
    assert min(cert.slacks) >= 0.0
    with pytest.raises(LedgerError):
        choose_M_eps_alternative(p, M_c0=0.0)


def test_scalar_inequality_suite_clean():
    out = scalar_inequality_suite(samples=20000, seed=3)
    assert out["passed"]
    assert out["violations_monotone"] == 0
    assert out["violations_product"] == 0


# ---------------------------------------------------------------------------
# initial-data smallness


def test_smallness_margins_main_variant():
    d = build_grid(1.0, 1.0, 32, 32)
    p = analytic_params()
    cert = choose_M_eps(p)
    amp = 0.2 * cert.eps
    st = cosine_state(d, m=1.0, amp_n=amp, amp_c=amp, amp_u=0.2 * amp)
    rep = check_initial_smallness(st.n, st.c, st.u, p, cert, "main")
    assert rep["passed"]
    assert rep["mean_n0"] == pytest.approx(1.0, abs=1e-12)
    for key in ("mass_margin", "n_margin", "c_margin", "u_margin"):
        assert rep[key] >= 0.0


def test_smallness_flags_oversized_data():
    d = build_grid(1.0, 1.0, 32, 32)
    p = analytic_params()
    cert = choose_M_eps(p)
    st = cosine_state(d, m=1.0, amp_n=1e-2, amp_c=1e-2)
    rep = check_initial_smallness(st.n, st.c, st.u, p, cert, "main")
    assert not rep["passed"]
    assert rep["n_margin"] < 0 and rep["c_margin"] < 0


def test_smallness_flags_wrong_mass():
    d = build_grid(1.0, 1.0, 32, 32)
    p = analytic_params()
    cert = choose_M_eps(p)
    st = cosine_state(d, m=1.5)  # parameters claim m = 1
    rep = check_initial_smallness(st.n, st.c, st.u, p, cert, "main")
    assert not rep["passed"] and rep["mass_margin"] < 0


def test_smallness_alternative_variant():
    d = build_grid(1.0, 1.0, 32, 32)
    p = analytic_params()
    cert = choose_M_eps_alternative(p, M_c0=1.0)
    # the alternative thresholds are tiny; a state at rest with flat
    # fields isolates the mass-threshold logic
    st = cosine_state(d, m=1.0, amp_n=0.0, amp_c=0.0)
    rep = check_initial_smallness(st.n, st.c, st.u, p, cert, "alternative")
    assert "mass_threshold_margin" in rep
    assert rep["mass_threshold_margin"] > 0.0  # m = 1 clears m0
    # |n0|_{p0} = m is far above eps here, so the check fails overall
    assert rep["n_margin"] < 0 and not rep["passed"]


def test_smallness_variant_name_checked():
    d = build_grid(1.0, 1.0, 32, 32)
    p = analytic_params()
    cert = choose_M_eps(p)
    st = cosine_state(d)
    with pytest.raises(LedgerError):
        check_initial_smallness(st.n, st.c, st.u, p, cert, "strict")
