"""Command-line front end.

Subcommands: simulate, constants, eigen, eta-study, heat-check, certify.
Exit codes: 0 success, 1 numerical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import io as ctio
from .config import (
    ConfigError,
    build_domain,
    build_initial_state,
    build_parameters,
    build_phi,
    build_sensitivity,
    build_step_config,
    load_config,
)
from .fluid import stokes_lambda1
from .grid import GridError, build_grid
from .ledger import (
    LedgerError,
    check_initial_smallness,
    choose_M_eps,
    choose_M_eps_alternative,
    compute_C1_to_C7,
    sigma,
)
from .monitor import NormTrace, certify
from .sensitivity import SensitivitySpec
from .simulate import eta_convergence_study, run_system
from .spectral import (
    duhamel_residual_n,
    lambda1_neumann,
    lambda1_neumann_continuum,
    neumann_lambda1,
    verify_heat_estimate,
)

MIN_EIG_CELLS = 32


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _estimate_k(domain, params, samples=25, seed=0):
    """Empirical heat constants for k1..k4 (one representative exponent
    pair each); the remaining constants keep their defaults."""
    pairs = {
        "k1": ("i", np.inf, params.p0),
        "k2": ("ii", np.inf, np.inf),
        "k3": ("iii", params.q0, params.q0),
        "k4": ("iv", params.q0, params.q0),
    }
    for name, (case, p, q) in pairs.items():
        params.k[name] = max(
            params.k[name], verify_heat_estimate(domain, case, p, q, samples=samples, seed=seed)
        )
        params.k_provenance[name] = "estimated"
    return params


def _build_all(args):
    cfg = load_config(args.config)
    domain = build_domain(cfg)
    lam1p = stokes_lambda1(domain).lambda1_prime
    params = build_parameters(cfg, domain, lam1p)
    if cfg.section("params")["estimate_k"]:
        _estimate_k(domain, params, seed=args.seed)
    return cfg, domain, params


def cmd_simulate(args):
    cfg, domain, params = _build_all(args)
    phi, _ = build_phi(cfg, domain)
    spec = build_sensitivity(cfg)
    step_cfg = build_step_config(cfg)
    stepping = cfg.section("stepping")
    out = cfg.section("output")

    state = build_initial_state(cfg, domain, params.m)
    C = compute_C1_to_C7(params, refine=args.refine)
    if args.variant == "alternative":
        M_c0 = max(float(np.max(state.c.values)), 1e-12)
        cert = choose_M_eps_alternative(params, M_c0, C=C)
    else:
        cert = choose_M_eps(params, C=C)
    smallness = check_initial_smallness(state.n, state.c, state.u, params, cert, args.variant)

    trace = NormTrace()
    state, _ = run_system(
        state,
        spec,
        phi,
        step_cfg,
        stepping["horizon"],
        params=params,
        trace=trace,
        record_every=stepping["record_every"],
        snapshot_every=0,
    )
    ctio.trace_to_csv(trace, _out_path(args, out["trace"]))
    report = certify(trace, cert, params)
    doc = ctio.report_to_dict(report)
    doc["certificate"] = cert.to_dict(params)
    doc["initial_smallness"] = smallness
    doc["clipped_mass"] = state.clipped_mass
    ctio.write_json(doc, _out_path(args, out["report"]))
    if out["checkpoint"]:
        ctio.write_checkpoint(state, _out_path(args, out["checkpoint"]))
    print(f"simulate: horizon {stepping['horizon']}, certify passed = {report.passed}")
    return 0


def cmd_constants(args):
    cfg, domain, params = _build_all(args)
    C = compute_C1_to_C7(params, refine=args.refine)
    if args.variant == "alternative":
        cert = choose_M_eps_alternative(params, M_c0=1.0, C=C)
    else:
        cert = choose_M_eps(params, C=C)
    doc = cert.to_dict(params)
    doc["sigma"] = sigma(params)
    doc["C"] = list(C)
    if cert.m0 is not None:
        doc["m0"] = cert.m0
    ctio.write_json(doc, _out_path(args, "certificate.json"))
    print(f"constants: eps = {cert.eps:.6g}, min slack = {min(cert.slacks):.6g}")
    return 0


def cmd_eigen(args):
    cfg = load_config(args.config)
    domain = build_domain(cfg)
    doc = {"Lx": domain.Lx, "Ly": domain.Ly, "nx": domain.nx, "ny": domain.ny}
    if min(domain.nx, domain.ny) < MIN_EIG_CELLS:
        print(
            f"warning: {domain.nx}x{domain.ny} is below the recommended "
            f"{MIN_EIG_CELLS} cells per side; reporting eigenvalues only",
            file=sys.stderr,
        )
        doc["lambda1"] = lambda1_neumann(domain)
        doc["lambda1_continuum"] = lambda1_neumann_continuum(domain)
    else:
        rep = neumann_lambda1(domain)
        se = stokes_lambda1(domain)
        doc["lambda1"] = rep.lambda1
        doc["lambda1_continuum"] = lambda1_neumann_continuum(domain)
        doc["lambda1_residual"] = rep.residual
        doc["lambda1_convergence"] = [list(row) for row in rep.convergence]
        doc["lambda1_prime"] = se.lambda1_prime
        doc["lambda1_prime_residual"] = se.residual
    ctio.write_json(doc, _out_path(args, "eigen.json"))
    print(f"eigen: lambda1 = {doc['lambda1']:.6f}" + (
        f", lambda1' = {doc['lambda1_prime']:.6f}" if "lambda1_prime" in doc else ""))
    return 0


def cmd_eta_study(args):
    cfg = load_config(args.config)
    domain = build_domain(cfg)
    phi, _ = build_phi(cfg, domain)
    spec = build_sensitivity(cfg)
    step_cfg = build_step_config(cfg)
    stepping = cfg.section("stepping")
    eta_list = cfg.section("study")["eta_list"]
    m = cfg.section("params")["m"]
    state0 = build_initial_state(cfg, domain, m)
    rows = eta_convergence_study(state0, spec, phi, step_cfg, eta_list, stepping["horizon"])
    path = _out_path(args, "eta_study.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["eta_coarse", "eta_fine", "n_gap", "c_gap"])
        for r in rows:
            w.writerow([f"{r[k]:.17g}" for k in ("eta_coarse", "eta_fine", "n_gap", "c_gap")])
    print("eta-study: gaps " + ", ".join(f"{r['n_gap']:.3g}" for r in rows))
    return 0


def cmd_heat_check(args):
    cfg = load_config(args.config)
    domain = build_domain(cfg)
    cases = [("i", 2, 2), ("i", np.inf, 2), ("ii", np.inf, np.inf), ("iii", 3, 2), ("iv", 4, 2)]
    doc = {"khat": {}}
    for case, p, q in cases:
        k = verify_heat_estimate(domain, case, p, q, samples=args.samples, seed=args.seed)
        doc["khat"][f"case_{case}_p{p}_q{q}"] = k

    # pure-diffusion mild-solution defect on the same grid
    from .grid import ScalarField
    from .steppers import StepConfig

    spec0 = SensitivitySpec(kind="zero")
    phi0 = ScalarField.constant(domain, 0.0)
    state = build_initial_state(cfg, domain, cfg.section("params")["m"])
    state.u.ux[:] = 0.0
    state.u.uy[:] = 0.0
    step_cfg = StepConfig(dt=cfg.section("stepping")["dt"])
    _, snaps = run_system(state, spec0, phi0, step_cfg, 0.1, snapshot_every=10)
    doc["pure_heat_duhamel_residual"] = duhamel_residual_n(snaps, spec0)
    ctio.write_json(doc, _out_path(args, "heat_check.json"))
    print("heat-check: khat " + ", ".join(f"{v:.3g}" for v in doc["khat"].values()))
    return 0


def cmd_certify(args):
    cfg, domain, params = _build_all(args)
    out = cfg.section("output")
    trace_path = args.trace or os.path.join(args.out, out["trace"])
    trace = ctio.trace_from_csv(trace_path)
    trace.nbar0 = params.m
    C = compute_C1_to_C7(params, refine=args.refine)
    if args.variant == "alternative":
        cert = choose_M_eps_alternative(params, M_c0=1.0, C=C)
    else:
        cert = choose_M_eps(params, C=C)
    report = certify(trace, cert, params)
    doc = ctio.report_to_dict(report)
    doc["certificate"] = cert.to_dict(params)
    ctio.write_json(doc, _out_path(args, "certify.json"))
    print(f"certify: passed = {report.passed}")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="ctns", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="TOML run configuration")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--variant", choices=["main", "alternative"], default="main")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--refine", type=int, default=1, help="t-grid refinement factor")

    sub.add_parser("simulate", parents=[common]).set_defaults(fn=cmd_simulate)
    sub.add_parser("constants", parents=[common]).set_defaults(fn=cmd_constants)
    sub.add_parser("eigen", parents=[common]).set_defaults(fn=cmd_eigen)
    sub.add_parser("eta-study", parents=[common]).set_defaults(fn=cmd_eta_study)
    hc = sub.add_parser("heat-check", parents=[common])
    hc.add_argument("--samples", type=int, default=25)
    hc.set_defaults(fn=cmd_heat_check)
    ce = sub.add_parser("certify", parents=[common])
    ce.add_argument("--trace", default="", help="trace CSV (default: from config)")
    ce.set_defaults(fn=cmd_certify)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (GridError, LedgerError, FloatingPointError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
