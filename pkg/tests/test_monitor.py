"""Trace recording, rate fitting, and the trajectory certificate checks."""

import numpy as np
import pytest

from ctns import (
    NormTrace,
    ScalarField,
    StepConfig,
    certify,
    choose_M_eps,
    fit_rate,
    record,
    run_system,
)
from ctns.monitor import COLUMNS

from conftest import cosine_state, make_params, rotation_spec


def synthetic_trace(rate=1.5, pref=2.0, noise=0.0, n=60, tmax=6.0, seed=0):
    rng = np.random.default_rng(seed)
    tr = NormTrace(track_heat_dev=False)
    tr.nbar0 = 1.0
    for t in np.linspace(0.05, tmax, n):
        tr.times.append(float(t))
        v = pref * np.exp(-rate * t) * np.exp(noise * rng.standard_normal())
        for col in COLUMNS[1:]:
            tr.data[col].append(float(v))
    return tr


def test_record_populates_all_columns(unit32, params32):
    st = cosine_state(unit32, amp_n=1e-3, amp_c=1e-3, amp_u=1e-4)
    tr = NormTrace()
    record(tr, st, params32, heat_ref=st.n)
    assert len(tr) == 1
    for col in COLUMNS[1:]:
        assert len(tr.data[col]) == 1
    # at t = 0 the heat reference is the density itself
    assert tr.data["n_minus_heat_inf"][0] == 0.0
    # max over cell centers sits half a cell inside the wall
    assert tr.data["c_inf"][0] == pytest.approx(1e-3, rel=1e-2)
    assert tr.nbar0 == pytest.approx(1.0)


def test_record_requires_increasing_times(unit32, params32):
    st = cosine_state(unit32)
    tr = NormTrace()
    record(tr, st, params32, heat_ref=st.n)
    with pytest.raises(ValueError):
        record(tr, st, params32, heat_ref=st.n)


def test_record_zero_velocity_norms(unit32, params32):
    st = cosine_state(unit32, amp_u=0.0)
    tr = NormTrace()
    record(tr, st, params32, heat_ref=st.n)
    assert tr.data["u_q0"][0] == 0.0
    assert tr.data["grad_u_N"][0] == 0.0
    assert tr.data["u_l2"][0] == 0.0


def test_fit_rate_recovers_exact_exponential():
    tr = synthetic_trace(rate=1.5, pref=2.0)
    fit = fit_rate(tr, "c_inf", window=(0.0, np.inf))
    assert fit.rate == pytest.approx(1.5, rel=1e-10)
    assert fit.prefactor == pytest.approx(2.0, rel=1e-8)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert not fit.floored


def test_fit_rate_noise_tolerant():
    tr = synthetic_trace(rate=0.8, noise=0.05, n=200, seed=4)
    fit = fit_rate(tr, "u_inf", window=(0.0, np.inf))
    assert fit.rate == pytest.approx(0.8, rel=0.05)
    assert fit.r2 > 0.9


def test_fit_rate_window_row_minimum():
    tr = synthetic_trace(n=30, tmax=3.0)
    with pytest.raises(ValueError):
        fit_rate(tr, "c_inf", window=(2.9, 3.0))


def test_fit_rate_floors_dead_columns():
    tr = synthetic_trace()
    tr.data["u_inf"] = [0.0] * len(tr)
    fit = fit_rate(tr, "u_inf", window=(0.0, np.inf))
    assert fit.floored
    assert fit.rate == pytest.approx(0.0, abs=1e-10)


def test_certify_small_data_run_passes(unit32):
    # a run started inside the smallness ball should satisfy all four
    # trajectory inequalities and the oxygen envelope
    params = make_params(unit32, C_S=0.2)
    cert = choose_M_eps(params)
    amp = 0.1 * cert.eps
    st = cosine_state(unit32, amp_n=amp, amp_c=amp, amp_u=0.2 * amp)
    phi = ScalarField.from_function(unit32, lambda x, y: -y)
    tr = NormTrace()
    run_system(
        st,
        rotation_spec(),
        phi,
        StepConfig(dt=2e-3),
        horizon=2.0,
        params=params,
        trace=tr,
        record_every=10,
    )
    rep = certify(tr, cert, params)
    assert rep.passed
    for name in ("n_heat_dev_q0", "n_heat_dev_inf", "grad_c_inf", "u_q0", "grad_u_N"):
        assert rep.inequalities[name]["holds"]
        assert rep.inequalities[name]["first_violation"] is None
    assert rep.envelope["holds"]
    assert rep.u_norm_kind == "l2_surrogate"
    # decay rates come out positive on this horizon
    assert rep.rates["r_c"].rate > 0.5


def test_certify_flags_oversized_run(unit32):
    # amplitudes far above eps must violate at least one inequality
    params = make_params(unit32, C_S=0.2)
    cert = choose_M_eps(params)
    st = cosine_state(unit32, amp_n=1e-2, amp_c=1e-2)
    phi = ScalarField.from_function(unit32, lambda x, y: -y)
    tr = NormTrace()
    run_system(
        st,
        rotation_spec(),
        phi,
        StepConfig(dt=2e-3),
        horizon=2.0,
        params=params,
        trace=tr,
        record_every=10,
    )
    rep = certify(tr, cert, params)
    assert not rep.passed
    bad = [n for n, v in rep.inequalities.items() if not v["holds"]]
    assert bad
    worst = min(v["min_slack"] for v in rep.inequalities.values())
    assert worst < 0


def test_certify_needs_rows(params32):
    from ctns import LedgerError

    with pytest.raises(LedgerError):
        certify(NormTrace(), choose_M_eps(params32), params32)
