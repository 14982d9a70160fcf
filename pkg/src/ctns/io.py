"""Serialization: trace CSV, certificate/report JSON, binary checkpoints.

Floats in CSVs are written with 17 significant digits so identical runs
produce byte-identical files.  Checkpoints are a flat little-endian
layout: magic "CTNS1", float64 Lx Ly, int32 nx ny, float64 t, float64
clipped mass, then n, c, ux, uy as C-order float64 blocks.
"""

from __future__ import annotations

import csv
import json
import struct

import numpy as np

from .grid import GridError, ScalarField, SystemState, VectorField, build_grid
from .monitor import COLUMNS, CertificateReport, NormTrace

__all__ = [
    "trace_to_csv",
    "trace_from_csv",
    "report_to_dict",
    "write_json",
    "write_checkpoint",
    "read_checkpoint",
]

MAGIC = b"CTNS1"


def trace_to_csv(trace: NormTrace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for i, t in enumerate(trace.times):
            row = [t] + [trace.data[c][i] for c in COLUMNS[1:]]
            w.writerow([f"{v:.17g}" for v in row])


def trace_from_csv(path) -> NormTrace:
    trace = NormTrace()
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        if header != COLUMNS:
            raise ValueError(f"unexpected trace header in {path}")
        for row in r:
            vals = [float(x) for x in row]
            trace.times.append(vals[0])
            for c, v in zip(COLUMNS[1:], vals[1:]):
                trace.data[c].append(v)
    return trace


def report_to_dict(report: CertificateReport) -> dict:
    return {
        "passed": report.passed,
        "u_norm_kind": report.u_norm_kind,
        "inequalities": report.inequalities,
        "envelope": report.envelope,
        "rates": {
            k: {
                "rate": f.rate,
                "prefactor": f.prefactor,
                "r2": f.r2,
                "floored": f.floored,
            }
            for k, f in report.rates.items()
        },
    }


def write_json(obj: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_checkpoint(state: SystemState, path) -> None:
    d = state.n.domain
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<ddiidd", d.Lx, d.Ly, d.nx, d.ny, state.t, state.clipped_mass))
        for arr in (state.n.values, state.c.values, state.u.ux, state.u.uy):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_checkpoint(path) -> SystemState:
    with open(path, "rb") as fh:
        if fh.read(5) != MAGIC:
            raise GridError(f"{path} is not a checkpoint file")
        Lx, Ly, nx, ny, t, clipped = struct.unpack("<ddiidd", fh.read(40))
        d = build_grid(Lx, Ly, nx, ny)

        def block(shape):
            count = shape[0] * shape[1]
            a = np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(shape)
            return a.astype(float)

        n = ScalarField(d, block((nx, ny)))
        c = ScalarField(d, block((nx, ny)))
        ux = block((nx + 1, ny))
        uy = block((nx, ny + 1))
    return SystemState(n, c, VectorField(d, ux, uy), t, clipped)
