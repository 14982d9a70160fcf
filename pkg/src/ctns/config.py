"""TOML run configuration: strict schema, catalog initial data, and the
builders that turn a config into simulation-ready objects."""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .grid import RectDomain, ScalarField, SystemState, VectorField, build_grid, mean
from .ledger import ParameterSet
from .sensitivity import SensitivitySpec
from .spectral import heat_apply, lambda1_neumann
from .steppers import StepConfig

__all__ = ["ConfigError", "RunConfig", "load_config", "dump_config", "build_initial_state", "build_phi"]


class ConfigError(ValueError):
    pass


# section -> key -> (type, required, default)
_SCHEMA = {
    "domain": {
        "Lx": (float, True, None),
        "Ly": (float, True, None),
        "nx": (int, True, None),
        "ny": (int, True, None),
    },
    "params": {
        "m": (float, False, 1.0),
        "p0": (float, False, 1.5),
        "q0": (float, False, 3.0),
        "q1": (float, False, 0.0),
        "beta": (float, False, 0.75),
        "alpha1": (float, False, 0.0),   # 0 = 0.8*min(m, lambda1)
        "alpha2": (float, False, 0.0),   # 0 = 0.8*min(alpha1, lambda1')
        "mu": (float, False, 0.0),       # 0 = midpoint of (alpha2, lambda1')
        "C_S": (float, False, 1.0),
        "estimate_k": (bool, False, False),
        "k": (dict, False, None),
    },
    "potential": {
        "grad": (list, False, [0.0, -1.0]),  # constant gradient of Phi
    },
    "initial": {
        "kind": (str, False, "constant_plus_cosine"),
        "amp_n": (float, False, 0.0),
        "amp_c": (float, False, 0.0),
        "amp_u": (float, False, 0.0),
        "noise_amp": (float, False, 0.0),
        "center": (list, False, [0.5, 0.5]),
        "width": (float, False, 0.1),
        "seed": (int, False, 0),
        "path": (str, False, ""),
    },
    "sensitivity": {
        "kind": (str, False, "zero"),
        "chi": (float, False, 0.0),
        "theta": (float, False, 0.0),
        "C_S": (float, False, 1.0),
        "eta": (float, False, 0.0),
        "table": (dict, False, None),
    },
    "stepping": {
        "dt": (float, True, None),
        "horizon": (float, True, None),
        "record_every": (int, False, 100),
        "snapshot_every": (int, False, 0),
        "kappa": (float, False, 0.9),
        "advect_velocity": (bool, False, True),
    },
    "output": {
        "trace": (str, False, "trace.csv"),
        "report": (str, False, "report.json"),
        "checkpoint": (str, False, ""),
    },
    "study": {
        "eta_list": (list, False, [0.2, 0.1, 0.05, 0.025]),
    },
}


@dataclass
class RunConfig:
    raw: dict = field(default_factory=dict)

    def section(self, name: str) -> dict:
        out = {}
        got = self.raw.get(name, {})
        for key, (typ, required, default) in _SCHEMA[name].items():
            if key in got:
                out[key] = got[key]
            elif required:
                raise ConfigError(f"missing required key {name}.{key}")
            else:
                out[key] = default
        return out


def _coerce(value, typ, where):
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean, got {value!r}")
        return value
    if typ is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if typ is list:
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected an array, got {value!r}")
        return value
    if typ is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"{where}: expected a table, got {value!r}")
        return value
    raise AssertionError(typ)


def load_config(path) -> RunConfig:
    """Parse and validate a TOML run configuration; unknown keys are
    rejected by name."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section, table in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(table, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in table.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            typ = _SCHEMA[section][key][0]
            table[key] = _coerce(value, typ, f"{section}.{key}")
    cfg = RunConfig(raw)
    for name in _SCHEMA:
        cfg.section(name)  # force required-key validation
    return cfg


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v) or math.isnan(v):
            raise ConfigError("cannot serialize non-finite numbers")
        s = repr(v)
        return s if ("." in s or "e" in s or "E" in s) else s + ".0"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {type(v).__name__} values")


def dump_config(cfg: RunConfig) -> str:
    """Serialize back to TOML (only the keys that were present)."""
    lines = []
    for section in _SCHEMA:
        if section not in cfg.raw:
            continue
        table = cfg.raw[section]
        plain = {k: v for k, v in table.items() if not isinstance(v, dict)}
        subs = {k: v for k, v in table.items() if isinstance(v, dict)}
        lines.append(f"[{section}]")
        for k, v in plain.items():
            lines.append(f"{k} = {_toml_value(v)}")
        for sub, sv in subs.items():
            lines.append(f"[{section}.{sub}]")
            for k, v in sv.items():
                lines.append(f"{k} = {_toml_value(v)}")
        lines.append("")
    return "\n".join(lines)


def build_domain(cfg: RunConfig) -> RectDomain:
    d = cfg.section("domain")
    return build_grid(d["Lx"], d["Ly"], d["nx"], d["ny"])


def build_phi(cfg: RunConfig, domain: RectDomain) -> tuple[ScalarField, float]:
    g = cfg.section("potential")["grad"]
    if len(g) != 2:
        raise ConfigError("potential.grad must have two components")
    gx, gy = float(g[0]), float(g[1])
    phi = ScalarField.from_function(domain, lambda x, y: gx * x + gy * y)
    return phi, math.hypot(gx, gy)


def build_parameters(cfg: RunConfig, domain: RectDomain, lambda1_prime: float) -> ParameterSet:
    p = cfg.section("params")
    lam1 = lambda1_neumann(domain)
    alpha1 = p["alpha1"] or 0.8 * min(p["m"], lam1)
    alpha2 = p["alpha2"] or 0.8 * min(alpha1, lambda1_prime)
    mu = p["mu"] or 0.5 * (alpha2 + lambda1_prime)
    kwargs = {}
    if p["k"] is not None:
        k = {f"k{i}": 1.0 for i in range(1, 10)}
        prov = {f"k{i}": "default" for i in range(1, 10)}
        for key, v in p["k"].items():
            if key not in k:
                raise ConfigError(f"unknown constant params.k.{key}")
            k[key] = _coerce(v, float, f"params.k.{key}")
            prov[key] = "user"
        kwargs = {"k": k, "k_provenance": prov}
    return ParameterSet(
        m=p["m"],
        p0=p["p0"],
        q0=p["q0"],
        q1=p["q1"],
        beta=p["beta"],
        alpha1=alpha1,
        alpha2=alpha2,
        mu=mu,
        C_S=p["C_S"],
        grad_phi_inf=build_phi(cfg, domain)[1],
        volume=domain.volume,
        lambda1=lam1,
        lambda1_prime=lambda1_prime,
        **kwargs,
    )


def build_sensitivity(cfg: RunConfig) -> SensitivitySpec:
    s = cfg.section("sensitivity")
    return SensitivitySpec(
        kind=s["kind"], chi=s["chi"], theta=s["theta"], C_S=s["C_S"], eta=s["eta"], table=s["table"]
    )


def build_step_config(cfg: RunConfig) -> StepConfig:
    s = cfg.section("stepping")
    return StepConfig(dt=s["dt"], kappa=s["kappa"], advect_velocity=s["advect_velocity"])


def _stream_velocity(domain: RectDomain, psi_corner: np.ndarray) -> VectorField:
    """Exact discrete curl of a corner stream function: divergence-free to
    round-off and no-slip whenever psi vanishes on the boundary."""
    h = domain.h
    ux = (psi_corner[:, 1:] - psi_corner[:, :-1]) / h
    uy = -(psi_corner[1:, :] - psi_corner[:-1, :]) / h
    return VectorField(domain, ux, uy)


def build_initial_state(cfg: RunConfig, domain: RectDomain, m: float) -> SystemState:
    ini = cfg.section("initial")
    kind = ini["kind"]
    if kind == "file":
        from .io import read_checkpoint

        if not ini["path"]:
            raise ConfigError("initial.kind = 'file' needs initial.path")
        state = read_checkpoint(ini["path"])
        if state.n.domain != domain:
            raise ConfigError("checkpoint domain mismatch")
        return state

    x, y = domain.cell_centers()
    Lx, Ly = domain.Lx, domain.Ly
    xc_corner = np.linspace(0.0, Lx, domain.nx + 1)[:, None]
    yc_corner = np.linspace(0.0, Ly, domain.ny + 1)[None, :]

    if kind == "constant_plus_cosine":
        bump_n = np.cos(np.pi * x / Lx) * np.cos(np.pi * y / Ly)
        bump_c = 0.5 * (1.0 + np.cos(np.pi * y / Ly))
    elif kind == "gaussian_bump":
        cx, cy = ini["center"]
        w = ini["width"]
        g = np.exp(-((x - cx * Lx) ** 2 + (y - cy * Ly) ** 2) / (2.0 * w**2))
        bump_n = g - g.mean()
        bump_c = np.exp(-((x - cx * Lx) ** 2 + (y - cy * Ly) ** 2) / (2.0 * w**2))
    else:
        raise ConfigError(f"unknown initial.kind {kind!r}")

    nv = m + ini["amp_n"] * bump_n
    if ini["noise_amp"]:
        rng = np.random.default_rng(ini["seed"])
        noise = rng.standard_normal((domain.nx, domain.ny))
        noise = heat_apply(ScalarField(domain, noise), 4.0 * domain.h**2).values
        noise -= noise.mean()
        nv = nv + ini["noise_amp"] * noise
    if np.any(nv < 0):
        raise ConfigError("initial cell density has negative values")
    n0 = ScalarField(domain, nv)
    c0 = ScalarField(domain, ini["amp_c"] * bump_c)

    psi = (
        ini["amp_u"]
        * np.sin(np.pi * xc_corner / Lx) ** 2
        * np.sin(np.pi * yc_corner / Ly) ** 2
    )
    u0 = _stream_velocity(domain, psi)
    return SystemState(n0, c0, u0, 0.0)
