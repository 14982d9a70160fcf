"""TOML configuration: schema enforcement, round-trips, and the builders."""

import numpy as np
import pytest

from ctns import lambda1_neumann
from ctns.config import (
    ConfigError,
    build_domain,
    build_initial_state,
    build_parameters,
    build_phi,
    build_sensitivity,
    build_step_config,
    dump_config,
    load_config,
)
from ctns.operators import divergence

from conftest import LAMBDA1_PRIME_UNIT_SQUARE

BASE = """
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
amp_n = 1e-3
amp_c = 1e-3
amp_u = 1e-4

[stepping]
dt = 1e-3
horizon = 0.1
record_every = 10
"""


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_and_build_everything(tmp_path):
    cfg = load_config(write(tmp_path, BASE))
    d = build_domain(cfg)
    assert (d.nx, d.ny) == (32, 32)
    phi, gmag = build_phi(cfg, d)
    assert gmag == pytest.approx(1.0)  # default potential gradient (0, -1)
    params = build_parameters(cfg, d, LAMBDA1_PRIME_UNIT_SQUARE)
    assert params.lambda1 == pytest.approx(lambda1_neumann(d))
    assert params.alpha1 == pytest.approx(0.8 * min(1.0, params.lambda1))
    spec = build_sensitivity(cfg)
    assert spec.kind == "rotation" and spec.chi == 0.1
    step = build_step_config(cfg)
    assert step.dt == 1e-3
    st = build_initial_state(cfg, d, params.m)
    assert st.n.values.mean() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(divergence(st.u).values)) < 1e-10


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, BASE + "\n[extra]\nfoo = 1\n"))


def test_unknown_key_rejected_by_name(tmp_path):
    with pytest.raises(ConfigError) as ei:
        load_config(write(tmp_path, BASE + "\n[output]\ntrase = \"x.csv\"\n"))
    assert "trase" in str(ei.value)


def test_missing_required_key(tmp_path):
    text = BASE.replace("horizon = 0.1\n", "")
    with pytest.raises(ConfigError) as ei:
        load_config(write(tmp_path, text))
    assert "stepping.horizon" in str(ei.value)


def test_type_errors_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, BASE.replace("nx = 32", 'nx = "32"')))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, BASE.replace("dt = 1e-3", "dt = true")))


def test_malformed_toml_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[domain\nLx ="))


def test_dump_load_roundtrip(tmp_path):
    cfg = load_config(write(tmp_path, BASE))
    dumped = dump_config(cfg)
    cfg2 = load_config(write(tmp_path, dumped, name="round.toml"))
    for sec in ("domain", "params", "sensitivity", "initial", "stepping", "output"):
        assert cfg.section(sec) == cfg2.section(sec)


def test_gaussian_initial_kind(tmp_path):
    text = BASE.replace('kind = "constant_plus_cosine"', 'kind = "gaussian_bump"')
    cfg = load_config(write(tmp_path, text))
    d = build_domain(cfg)
    st = build_initial_state(cfg, d, 1.0)
    assert st.n.values.mean() == pytest.approx(1.0, abs=1e-12)
    assert st.n.values.min() >= 0.0
    # the bump concentrates at the configured center
    i, j = np.unravel_index(np.argmax(st.n.values), st.n.values.shape)
    assert abs(i - d.nx // 2) <= 1 and abs(j - d.ny // 2) <= 1


def test_unknown_initial_kind(tmp_path):
    text = BASE.replace('kind = "constant_plus_cosine"', 'kind = "vortex_sheet"')
    cfg = load_config(write(tmp_path, text))
    with pytest.raises(ConfigError):
        build_initial_state(cfg, build_domain(cfg), 1.0)


def test_file_initial_kind_roundtrip(tmp_path):
    from ctns.io import write_checkpoint

    cfg = load_config(write(tmp_path, BASE))
    d = build_domain(cfg)
    st = build_initial_state(cfg, d, 1.0)
    ck = tmp_path / "seed.ctns"
    write_checkpoint(st, ck)
    text = BASE.replace(
        '[initial]\nkind = "constant_plus_cosine"',
        f'[initial]\nkind = "file"\npath = "{ck}"',
    )
    cfg2 = load_config(write(tmp_path, text, name="file.toml"))
    st2 = build_initial_state(cfg2, d, 1.0)
    assert np.array_equal(st2.n.values, st.n.values)
    assert np.array_equal(st2.u.ux, st.u.ux)
