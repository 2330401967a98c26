"""CLI harness: config validation, artifacts, reproducibility, verify suites."""

import json

import numpy as np
import pytest

from octowind import cli
from octowind.errors import ConfigError
from octowind.geometry import ModelSpace


# ---------------------------------------------------------------------------
# Config parsing and validation

def test_parse_config_json():
    cfg = cli.parse_config('{"space": "projective", "t_end": 2.5, "n_paths": 100, "r0": 0.4}')
    assert cfg.space is ModelSpace.PROJECTIVE
    assert cfg.t_end == 2.5
    assert cfg.n_paths == 100


def test_parse_config_key_value():
    cfg = cli.parse_config("space = hyperbolic\nt_end = 3\n# a comment\nseed = 5\n")
    assert cfg.space is ModelSpace.HYPERBOLIC
    assert cfg.seed == 5


def test_parse_config_duplicate_key_json():
    with pytest.raises(ConfigError) as exc:
        cli.parse_config('{"t_end": 1, "t_end": 2}')
    assert any("duplicate" in v for v in exc.value.violations)


def test_parse_config_duplicate_key_lines():
    with pytest.raises(ConfigError) as exc:
        cli.parse_config("t_end = 1\nt_end = 2\n")
    assert any("duplicate" in v for v in exc.value.violations)


def test_parse_config_bad_line():
    with pytest.raises(ConfigError):
        cli.parse_config("this is not a key value pair\n")


def test_validate_unknown_key_and_bad_values():
    with pytest.raises(ConfigError) as exc:
        cli.parse_config('{"spce": "flat", "dt": -1, "n_paths": 0, "scheme": "rk4"}')
    msgs = "\n".join(exc.value.violations)
    assert "unknown key 'spce'" in msgs
    assert "dt" in msgs and "n_paths" in msgs and "scheme" in msgs


def test_validate_names_every_violation():
    with pytest.raises(ConfigError) as exc:
        cli.parse_config('{"space": "moebius", "t_end": -3, "seed": "abc"}')
    assert len(exc.value.violations) >= 3


def test_validate_hyperbolic_chart_bound():
    w0 = "1.0,0,0,0,0,0,0,0.5"
    with pytest.raises(ConfigError) as exc:
        cli.parse_config(json.dumps({"space": "hyperbolic", "w0": w0}))
    assert any("chart bound" in v for v in exc.value.violations)


def test_validate_requires_start_point():
    # An unparseable r0 leaves the run without a start point; both problems
    # must be reported.
    with pytest.raises(ConfigError) as exc:
        cli._validate({"r0": "x"})
    msgs = "\n".join(exc.value.violations)
    assert "r0" in msgs
    assert "required" in msgs


def test_config_hash_stable():
    cfg1 = cli.parse_config('{"space": "flat", "seed": 1}')
    cfg2 = cli.parse_config('{"seed": 1, "space": "flat"}')
    assert cfg1.config_hash() == cfg2.config_hash()
    cfg3 = cli.parse_config('{"space": "flat", "seed": 2}')
    assert cfg1.config_hash() != cfg3.config_hash()


# ---------------------------------------------------------------------------
# Subcommands

def _run(argv):
    return cli.main(argv)


def test_simulate_radial_reproducible(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    argv = ["simulate", "--space", "flat", "--t", "0.1", "--dt", "0.001",
            "--r0", "1.0", "--seed", "3"]
    assert _run(argv + ["--out", str(out1)]) == 0
    assert _run(argv + ["--out", str(out2)]) == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0].startswith("# config ")
    assert lines[1] == "time,r,clock"
    assert len(lines) == 2 + 101  # header lines + t=0 + 100 steps


def test_simulate_coordinate_csv(tmp_path):
    out = tmp_path / "c.csv"
    argv = ["simulate", "--space", "projective", "--t", "0.05", "--dt", "0.001",
            "--w0", "0.5,0,0,0,0,0,0,0", "--seed", "4", "--out", str(out)]
    assert _run(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[1].split(",")[:2] == ["time", "c0"]
    assert lines[1].split(",")[-1] == "zeta7"
    data = np.loadtxt(out, delimiter=",", skiprows=2)
    assert data.shape == (51, 16)
    assert np.all(data[0, 9:] == 0.0)  # winding starts at zero


def test_charfn_flat_matches_quadrature(tmp_path, capsys):
    out = tmp_path / "cf.csv"
    argv = ["charfn", "--space", "flat", "--t", "1.0", "--dt", "0.01",
            "--paths", "2000", "--r0", "1.0", "--lambda-norm", "1.0",
            "--seed", "5", "--out", str(out)]
    assert _run(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "space,lambda_norm,r0,t,n_paths,mc_value,mc_se,closed_form"
    row = lines[2].split(",")
    mc_value, mc_se, closed = float(row[5]), float(row[6]), float(row[7])
    assert abs(mc_value - closed) < 6 * mc_se + 0.01


def test_table_flat(tmp_path):
    out = tmp_path / "tab.csv"
    argv = ["table", "--space", "flat", "--r0", "1.0", "--lambda-norm", "1.0",
            "--t-values", "1e3,1e8", "--out", str(out)]
    assert _run(argv) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "space,lambda_norm,r0,t,closed_form_value"
    assert len(lines) == 2 + 3  # two horizons plus the limit row
    assert lines[-1].split(",")[3] == "inf"


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("space = flat\nt_end = 0.1\ndt = 0.001\nr0 = 1.0\nseed = 9\n")
    out = tmp_path / "o.csv"
    assert _run(["simulate", "--config", str(cfg), "--seed", "10", "--out", str(out)]) == 0
    assert "# config" in out.read_text().splitlines()[0]


def test_config_error_exit_code(tmp_path, capsys):
    assert _run(["simulate", "--space", "flat", "--dt", "-1"]) == 2
    err = capsys.readouterr().err
    assert "config error" in err and "dt" in err


def test_verify_all_passes(tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert _run(["verify", "--suite", "all", "--out", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["pass"] is True
    assert set(report["suites"]) == {"algebra", "engine", "specfun"}
    out = capsys.readouterr().out
    assert "norm_multiplicativity: pass" in out
