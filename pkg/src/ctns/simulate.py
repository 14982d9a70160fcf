"""Run loops: advance the coupled system, record traces and snapshots,
and measure the cutoff-width convergence of the dynamics."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .grid import ScalarField, SystemState
from .monitor import NormTrace, record
from .sensitivity import SensitivitySpec
from .spectral import heat_apply
from .steppers import StepConfig, step_system

__all__ = ["run_system", "eta_convergence_study"]


def run_system(
    state: SystemState,
    spec: SensitivitySpec,
    phi: ScalarField,
    cfg: StepConfig,
    horizon: float,
    params=None,
    trace: NormTrace | None = None,
    record_every: int = 0,
    snapshot_every: int = 0,
):
    """Advance the system to the horizon.

    record_every / snapshot_every are step strides (0 = off).  Trace rows
    include the heat-flow reference of the initial density, evaluated
    exactly at each record time.  Returns (final_state, snapshots).
    """
    nsteps = int(round(horizon / cfg.dt))
    if abs(nsteps * cfg.dt - horizon) > 1e-9 * max(1.0, horizon):
        raise ValueError("horizon must be an integer number of steps")
    n0 = state.n.copy()
    t0 = state.t
    snapshots = []
    if snapshot_every:
        snapshots.append(state.copy())
    if trace is not None and record_every:
        record(trace, state, params, heat_ref=n0)
    for k in range(1, nsteps + 1):
        state = step_system(state, spec, phi, cfg)
        if not (
            np.all(np.isfinite(state.n.values))
            and np.all(np.isfinite(state.c.values))
            and np.all(np.isfinite(state.u.ux))
        ):
            raise FloatingPointError(f"nonfinite field at t={state.t}")
        if trace is not None and record_every and k % record_every == 0:
            record(trace, state, params, heat_ref=heat_apply(n0, state.t - t0))
        if snapshot_every and k % snapshot_every == 0:
            snapshots.append(state.copy())
    return state, snapshots


def eta_convergence_study(
    state0: SystemState,
    spec: SensitivitySpec,
    phi: ScalarField,
    cfg: StepConfig,
    eta_list,
    horizon: float,
):
    """Sup-norm gaps of the dynamics between consecutive cutoff widths.

    Runs the full system once per eta in the (decreasing) list, all other
    settings identical, and reports |n_eta - n_eta'|_inf and the c
    analogue at the final time for each consecutive pair.
    """
    eta_list = list(eta_list)
    if len(eta_list) < 2:
        raise ValueError("need at least two cutoff widths")
    if any(b >= a for a, b in zip(eta_list, eta_list[1:])):
        raise ValueError("cutoff widths must be strictly decreasing")
    finals = []
    for eta in eta_list:
        run_spec = replace(spec, eta=eta)
        final, _ = run_system(state0.copy(), run_spec, phi, cfg, horizon)
        finals.append(final)
    rows = []
    for (ea, sa), (eb, sb) in zip(zip(eta_list, finals), zip(eta_list[1:], finals[1:])):
        rows.append(
            {
                "eta_coarse": ea,
                "eta_fine": eb,
                "n_gap": float(np.max(np.abs(sa.n.values - sb.n.values))),
                "c_gap": float(np.max(np.abs(sa.c.values - sb.c.values))),
            }
        )
    return rows
