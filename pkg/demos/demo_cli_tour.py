"""Tour of the command-line interface.

Everything the library does is reachable from the `ctns` console script:
config-driven simulation with trace/checkpoint/report artifacts, the
constants ledger, the eigenvalue solvers, the cutoff study, and the
semigroup checks.  This script writes a small config, runs several
subcommands in a scratch directory, and prints what they produced.
"""

import json
import pathlib
import subprocess
import sys
import tempfile

CONFIG = """\
[domain]
Lx = 1.0
Ly = 1.0
nx = 32
ny = 32

[params]
m = 1.0
C_S = 0.2

[sensitivity]
kind = "rotation"
chi = 0.1
theta = 0.6
C_S = 0.2

[initial]
kind = "constant_plus_cosine"
amp_n = 1e-6
amp_c = 1e-6
amp_u = 1e-7

[stepping]
dt = 1e-3
horizon = 0.05
record_every = 5

[output]
checkpoint = "final.ctns"

[study]
eta_list = [0.2, 0.1]
"""


def run(*args):
    print("$ ctns " + " ".join(args))
    res = subprocess.run([sys.executable, "-m", "ctns.cli", *args],
                         capture_output=True, text=True)
    if res.returncode:
        print(res.stderr)
        raise SystemExit(res.returncode)
    return res.stdout


with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    cfg = tmp / "run.toml"
    cfg.write_text(CONFIG)

    run("simulate", "--config", str(cfg), "--out", str(tmp / "out"))
    print("  artifacts:", sorted(p.name for p in (tmp / "out").iterdir()))
    report = json.loads((tmp / "out" / "report.json").read_text())
    print("  report passed:", report["passed"])

    out = run("constants", "--config", str(cfg), "--out", str(tmp / "const"))
    cert = json.loads((tmp / "const" / "certificate.json").read_text())
    print("  eps = %.4g,  slacks all positive: %s"
          % (cert["eps"], all(s > 0 for s in cert["slacks"])))

    run("eigen", "--config", str(cfg), "--out", str(tmp / "eig"))
    eig = json.loads((tmp / "eig" / "eigen.json").read_text())
    print("  lambda1 = %.5f   lambda1' = %.5f"
          % (eig["lambda1"], eig["lambda1_prime"]))

    run("heat-check", "--config", str(cfg), "--out", str(tmp / "heat"),
        "--samples", "3")
    heat = json.loads((tmp / "heat" / "heat_check.json").read_text())
    print("  pure-heat Duhamel residual: %.2e"
          % heat["pure_heat_duhamel_residual"])

    run("certify", "--config", str(cfg), "--out", str(tmp / "cert2"),
        "--trace", str(tmp / "out" / "trace.csv"))
    print("  re-certification of the saved trace completed")
