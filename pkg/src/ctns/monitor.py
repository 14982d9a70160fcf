"""Norm trajectories, exponential-rate fits, and runtime certificate checks.

A NormTrace records the norms that the four trajectory inequalities of the
smallness certificate constrain, plus the plain decay norms of the
certified small-data guarantee.  certify() replays a finished trace
against a certificate and
reports, per inequality, the first violation time (if any) and the worst
relative slack; fit_rate() extracts empirical decay exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import ScalarField, SystemState, lp_norm, lp_norm_values, mean
from .ledger import Certificate, LedgerError, ParameterSet, sigma
from .operators import grad_centered, velocity_gradient_sq

__all__ = ["NormTrace", "FitResult", "CertificateReport", "record", "fit_rate", "certify"]

COLUMNS = [
    "t",
    "n_dev_q0",
    "n_dev_inf",
    "n_minus_heat_q0",
    "n_minus_heat_inf",
    "grad_c_inf",
    "c_inf",
    "c_w1q1",
    "u_q0",
    "grad_u_N",
    "u_inf",
    "u_l2",
]


@dataclass
class NormTrace:
    track_heat_dev: bool = True
    times: list = field(default_factory=list)
    data: dict = field(default_factory=lambda: {c: [] for c in COLUMNS[1:]})
    nbar0: float | None = None

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return np.asarray(self.times)
        return np.asarray(self.data[name])

    def __len__(self):
        return len(self.times)


def _velocity_center_mag(u):
    cx = 0.5 * (u.ux[:-1, :] + u.ux[1:, :])
    cy = 0.5 * (u.uy[:, :-1] + u.uy[:, 1:])
    return np.hypot(cx, cy)


def record(
    trace: NormTrace,
    state: SystemState,
    params: ParameterSet,
    heat_ref: ScalarField | None = None,
) -> None:
    """Append one fully populated row for the given state.

    heat_ref must be the heat-flow image of the initial cell density at
    the state's time whenever the trace tracks that deviation.
    """
    if trace.times and state.t <= trace.times[-1]:
        raise ValueError("record times must be strictly increasing")
    if trace.track_heat_dev and heat_ref is None:
        raise ValueError("heat_ref required while tracking the heat deviation")
    d = state.n.domain
    h = d.h
    if trace.nbar0 is None:
        trace.nbar0 = mean(state.n)
    nbar = trace.nbar0

    row = {}
    dev = state.n.values - nbar
    row["n_dev_q0"] = lp_norm_values(dev, h, params.q0)
    row["n_dev_inf"] = float(np.max(np.abs(dev)))
    if trace.track_heat_dev:
        hd = state.n.values - heat_ref.values
        row["n_minus_heat_q0"] = lp_norm_values(hd, h, params.q0)
        row["n_minus_heat_inf"] = float(np.max(np.abs(hd)))
    else:
        row["n_minus_heat_q0"] = 0.0
        row["n_minus_heat_inf"] = 0.0

    gx, gy = grad_centered(state.c)
    gmag = np.hypot(gx, gy)
    row["grad_c_inf"] = float(np.max(gmag))
    row["c_inf"] = lp_norm(state.c, np.inf)
    q1 = params.q1
    row["c_w1q1"] = float(
        (lp_norm(state.c, q1) ** q1 + lp_norm_values(gmag, h, q1) ** q1) ** (1.0 / q1)
    )

    umag = _velocity_center_mag(state.u)
    row["u_q0"] = lp_norm_values(umag, h, params.q0)
    row["grad_u_N"] = lp_norm_values(np.sqrt(velocity_gradient_sq(state.u)), h, params.N)
    row["u_inf"] = float(np.max(umag))
    row["u_l2"] = state.u.l2_norm()

    for k, v in row.items():
        if not math.isfinite(v):
            raise ValueError(f"nonfinite trace entry {k} at t={state.t}")
    trace.times.append(state.t)
    for k, v in row.items():
        trace.data[k].append(v)


@dataclass
class FitResult:
    rate: float
    prefactor: float
    r2: float
    floored: bool  # nonpositive values were floored before the log


def fit_rate(trace: NormTrace, column: str, window=(1.0, np.inf)) -> FitResult:
    """Least-squares exponential rate of one trace column over a window.

    Fits log(value) = log(prefactor) - rate * t.  Values below 1e-300 are
    floored (and flagged) so cancellation noise cannot produce -inf.
    """
    t = trace.column("t")
    v = trace.column(column)
    sel = (t >= window[0]) & (t <= window[1])
    if int(sel.sum()) < 20:
        raise ValueError("rate fit needs at least 20 rows in the window")
    t, v = t[sel], v[sel]
    floored = bool(np.any(v < 1e-300))
    logv = np.log(np.maximum(v, 1e-300))
    A = np.vstack([t, np.ones_like(t)]).T
    coef, res, _, _ = np.linalg.lstsq(A, logv, rcond=None)
    slope, intercept = coef
    ss_tot = float(np.sum((logv - logv.mean()) ** 2))
    ss_res = float(res[0]) if res.size else float(np.sum((logv - A @ coef) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return FitResult(-float(slope), float(np.exp(intercept)), r2, floored)


@dataclass
class CertificateReport:
    inequalities: dict      # name -> {holds, first_violation, min_slack, marginal}
    rates: dict             # name -> FitResult
    envelope: dict          # oxygen sup-norm envelope check
    u_norm_kind: str = "l2_surrogate"

    @property
    def passed(self) -> bool:
        return all(v["holds"] for v in self.inequalities.values()) and self.envelope["holds"]


def _check_inequality(t, lhs, rhs):
    slack = np.where(rhs > 0, (rhs - lhs) / np.where(rhs > 0, rhs, 1.0), -np.inf)
    bad = np.where(slack < 0)[0]
    first = float(t[bad[0]]) if bad.size else None
    min_slack = float(np.min(slack)) if slack.size else math.inf
    return {
        "holds": bad.size == 0,
        "first_violation": first,
        "min_slack": min_slack,
        "marginal": abs(min_slack) < 1e-6,
    }


def certify(trace: NormTrace, cert: Certificate, params: ParameterSet) -> CertificateReport:
    """Replay a trace against the four certificate trajectory bounds.

    The n bound is checked at theta = q0 and theta = infinity; t = 0 rows
    are skipped (the shape factors blow up there and the local theory
    covers them).  Also evaluates the oxygen envelope
    |c(t)|_inf <= |c(0)|_inf e^{sigma (M1+k1) eps} e^{-nbar0 t}
    and fits decay rates for the three certified decay displays.
    """
    if len(trace) < 2:
        raise LedgerError("certify needs a populated trace")
    t_all = trace.column("t")
    pos = t_all > 0.0
    t = t_all[pos]
    eps = cert.eps
    a1, a2 = params.alpha1, params.alpha2
    N, p0, q0 = params.N, params.p0, params.q0

    ineq = {}
    shape_n_q0 = 1.0 + t ** (-(N / 2.0) * (1.0 / p0 - 1.0 / q0))
    shape_n_inf = 1.0 + t ** (-(N / 2.0) / p0)
    ineq["n_heat_dev_q0"] = _check_inequality(
        t, trace.column("n_minus_heat_q0")[pos], cert.M1 * eps * shape_n_q0 * np.exp(-a1 * t)
    )
    ineq["n_heat_dev_inf"] = _check_inequality(
        t, trace.column("n_minus_heat_inf")[pos], cert.M1 * eps * shape_n_inf * np.exp(-a1 * t)
    )
    ineq["grad_c_inf"] = _check_inequality(
        t,
        trace.column("grad_c_inf")[pos],
        cert.M2 * eps * (1.0 + t**-0.5) * np.exp(-a1 * t),
    )
    ineq["u_q0"] = _check_inequality(
        t,
        trace.column("u_q0")[pos],
        cert.M3 * eps * (1.0 + t ** (-0.5 + N / (2.0 * q0))) * np.exp(-a2 * t),
    )
    ineq["grad_u_N"] = _check_inequality(
        t,
        trace.column("grad_u_N")[pos],
        cert.M4 * eps * (1.0 + t**-0.5) * np.exp(-a2 * t),
    )

    c0_inf = trace.column("c_inf")[0]
    nbar0 = trace.nbar0 if trace.nbar0 is not None else params.m
    env_rhs = (
        c0_inf
        * math.exp(sigma(params) * (cert.M1 + params.k["k1"]) * eps)
        * np.exp(-nbar0 * t)
    )
    envelope = _check_inequality(t, trace.column("c_inf")[pos], env_rhs)

    horizon = float(t_all[-1])
    window = (min(1.0, 0.5 * horizon), horizon)
    rates = {}
    for name, col in (("r_n", "n_dev_inf"), ("r_c", "c_w1q1"), ("r_u", "u_inf")):
        try:
            rates[name] = fit_rate(trace, col, window)
        except ValueError:
            pass
    return CertificateReport(ineq, rates, envelope)
