"""Run-loop semantics: strides, horizon validation, failure detection,
and the cutoff-width convergence study."""

import numpy as np
import pytest

from ctns import (
    NormTrace,
    ScalarField,
    SensitivitySpec,
    StepConfig,
    run_system,
)
from ctns.simulate import eta_convergence_study

from conftest import cosine_state, make_params, rotation_spec


def setup(domain, **kw):
    st = cosine_state(domain, amp_n=1e-3, amp_c=1e-3, amp_u=1e-4, **kw)
    phi = ScalarField.from_function(domain, lambda x, y: -y)
    return st, phi


def test_run_system_strides_and_final_time(unit32, params32):
    st, phi = setup(unit32)
    tr = NormTrace()
    final, snaps = run_system(
        st,
        rotation_spec(),
        phi,
        StepConfig(dt=1e-3),
        horizon=0.02,
        params=params32,
        trace=tr,
        record_every=5,
        snapshot_every=10,
    )
    assert final.t == pytest.approx(0.02)
    assert len(tr) == 5  # t = 0 plus 4 strides
    assert [round(s.t, 6) for s in snaps] == [0.0, 0.01, 0.02]


def test_run_system_horizon_must_be_integer_steps(unit32):
    st, phi = setup(unit32)
    with pytest.raises(ValueError):
        run_system(st, rotation_spec(), phi, StepConfig(dt=1e-3), horizon=0.0203)


def test_run_system_detects_nonfinite(unit32):
    from ctns import GridError

    st, phi = setup(unit32)
    st.c.values[5, 5] = np.nan
    # the field constructors reject nonfinite values as soon as the first
    # sub-step rebuilds a field; the run loop is a backstop on top
    with pytest.raises((FloatingPointError, GridError)):
        run_system(st, SensitivitySpec(kind="zero"), phi, StepConfig(dt=1e-3), horizon=0.01)


def test_eta_study_validates_widths(unit32):
    st, phi = setup(unit32)
    cfg = StepConfig(dt=1e-3)
    with pytest.raises(ValueError):
        eta_convergence_study(st, rotation_spec(), phi, cfg, [0.2], 0.01)
    with pytest.raises(ValueError):
        eta_convergence_study(st, rotation_spec(), phi, cfg, [0.1, 0.2], 0.01)


def test_eta_study_zero_sensitivity_has_zero_gaps(unit32):
    # with S = 0 the cutoff width is inert, so all runs coincide bitwise
    st, phi = setup(unit32)
    rows = eta_convergence_study(
        st, SensitivitySpec(kind="zero"), phi, StepConfig(dt=1e-3), [0.2, 0.1], 0.01
    )
    assert len(rows) == 1
    assert rows[0]["n_gap"] == 0.0 and rows[0]["c_gap"] == 0.0


def test_eta_study_reports_consecutive_pairs(unit32):
    st, phi = setup(unit32)
    rows = eta_convergence_study(
        st, rotation_spec(), phi, StepConfig(dt=1e-3), [0.2, 0.1, 0.05], 0.01
    )
    assert len(rows) == 2
    assert rows[0]["eta_coarse"] == 0.2 and rows[0]["eta_fine"] == 0.1
    assert all(np.isfinite(r["n_gap"]) and r["n_gap"] >= 0 for r in rows)


def test_run_system_does_not_mutate_input(unit32):
    st, phi = setup(unit32)
    before = st.n.values.copy()
    run_system(st.copy(), rotation_spec(), phi, StepConfig(dt=1e-3), horizon=0.01)
    assert np.array_equal(st.n.values, before)
