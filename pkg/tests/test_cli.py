"""Command line behaviour: argument handling, deterministic output,
config files, the verify battery, and the propagation comparison."""

import io
import json
import math
import shutil
import subprocess

import numpy as np
import pytest

from wavetrains.cli import main
from wavetrains.config import (
    RunConfig,
    from_dict,
    parse_pi_times,
    preset,
    to_dict,
)
from wavetrains.errors import ConfigError, UnknownPreset


def run_cli(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def meta_value(text, key):
    prefix = f"# {key} = "
    for line in text.splitlines():
        if line.startswith(prefix):
            return line[len(prefix):]
    raise KeyError(key)


def data_rows(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    names = lines[0].split(",")
    values = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    return names, values


# ------------------------------------------------------------ basic wiring

def test_version_flag(capsys):
    rc, out, _ = run_cli(capsys, ["--version"])
    assert rc == 0
    assert out.strip() == "wavetrains 0.1.0"


def test_unknown_preset_is_usage_error(capsys):
    rc, _, err = run_cli(capsys, ["classical", "--preset", "nope"])
    assert rc == 2
    assert "invalid choice" in err
    with pytest.raises(UnknownPreset):
        preset("nope")


def test_preset_and_config_are_exclusive(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(to_dict(RunConfig())))
    rc, _, err = run_cli(capsys, ["classical", "--preset", "static",
                                  "--config", str(path)])
    assert rc == 2
    assert "not allowed with" in err


# -------------------------------------------------------------- classical

def test_classical_csv_is_deterministic(tmp_path, capsys):
    path = tmp_path / "run.csv"
    args = ["classical", "--preset", "fig2-soliton",
            "--t-final", "2pi", "--samples", "129", "--out", str(path)]
    assert main(args) == 0
    first = path.read_bytes()
    assert main(args) == 0
    capsys.readouterr()
    assert path.read_bytes() == first

    text = first.decode()
    assert meta_value(text, "derived.c0") == "0.5"
    assert meta_value(text, "params.u2") == "0.25"
    assert meta_value(text, "tool.name") == "wavetrains"
    assert meta_value(text, "tool.version") == "0.1.0"

    names, rows = data_rows(text)
    assert names == ["t", "phi1", "phi2", "rho", "theta", "drho", "dtheta",
                     "c0_residual"]
    assert rows.shape == (129, 8)
    assert rows[0, 0] == 0.0
    assert abs(rows[-1, 0] - 2.0 * math.pi) < 1e-12
    assert float(np.max(np.abs(rows[:, 7]))) < 1e-8


def test_classical_json_document(capsys):
    rc, out, _ = run_cli(capsys, ["classical", "--preset", "static",
                                  "--t-final", "0.5pi", "--samples", "9",
                                  "--format", "json"])
    assert rc == 0
    doc = json.loads(out)
    assert sorted(doc) == ["columns", "config", "meta", "rows"]
    assert doc["meta"]["derived.c0"] == "1"
    assert doc["config"]["params"]["u2"] == 1.0
    assert len(doc["rows"]) == 9
    rho = [row[doc["columns"].index("rho")] for row in doc["rows"]]
    assert max(abs(r - 1.0) for r in rho) < 1e-10


def test_out_file_matches_stdout(tmp_path, capsys):
    # identical up to the self-describing output.path header line
    args = ["classical", "--preset", "static", "--t-final", "1", "--samples", "5"]
    rc, out, _ = run_cli(capsys, args)
    assert rc == 0
    path = tmp_path / "run.csv"
    assert main(args + ["--out", str(path)]) == 0
    capsys.readouterr()

    def stripped(text):
        return [ln for ln in text.splitlines()
                if not ln.startswith("# output.path")]

    assert stripped(path.read_text()) == stripped(out)


# --------------------------------------------------------------- snapshot

def test_snapshot_reports_structure_counts(capsys):
    rc, out, _ = run_cli(capsys, ["snapshot", "--preset", "static",
                                  "--times", "0,0.25pi",
                                  "--n", "3", "--b0", "0"])
    assert rc == 0
    count = int(meta_value(out, "grid.count"))
    for j, t in enumerate((0.0, 0.25 * math.pi)):
        assert float(meta_value(out, f"snapshot.{j}.t")) == pytest.approx(t)
        assert meta_value(out, f"snapshot.{j}.nodes") == "3"
        assert meta_value(out, f"snapshot.{j}.maxima") == "4"
        assert abs(float(meta_value(out, f"snapshot.{j}.xc"))) < 1e-12
        assert abs(float(meta_value(out, f"snapshot.{j}.norm")) - 1.0) < 1e-6
    names, rows = data_rows(out)
    assert names == ["t", "x", "density", "re_psi", "im_psi"]
    assert rows.shape == (2 * count, 5)
    density = rows[:count, 2]
    assert np.allclose(density, rows[:count, 3] ** 2 + rows[:count, 4] ** 2,
                       atol=1e-15)


def test_snapshot_rejects_empty_times(capsys):
    rc, _, err = run_cli(capsys, ["snapshot", "--preset", "static",
                                  "--times", ""])
    assert rc == 2
    assert "error:" in err


# ----------------------------------------------------------------- series

def test_series_static_constants(capsys):
    rc, out, _ = run_cli(capsys, ["series", "--preset", "static", "--n", "2",
                                  "--t-final", "2pi", "--samples", "33"])
    assert rc == 0
    names, rows = data_rows(out)
    assert names == ["t", "xc", "rho", "energy"]
    assert float(np.max(np.abs(rows[:, 1]))) == 0.0
    assert float(np.max(np.abs(rows[:, 2] - 1.0))) < 1e-10
    assert float(np.max(np.abs(rows[:, 3] - 2.5))) < 1e-9


def test_series_declared_c0_rescales_orbit(capsys):
    rc, out, _ = run_cli(capsys, ["series", "--preset", "fig2-soliton",
                                  "--declared-c0", "1",
                                  "--t-final", "0.5pi", "--samples", "9"])
    assert rc == 0
    _, rows = data_rows(out)
    assert abs(rows[0, 1] - (-10.0)) < 1e-9
    rc2, out2, _ = run_cli(capsys, ["series", "--preset", "fig2-soliton",
                                    "--t-final", "0.5pi", "--samples", "9"])
    assert rc2 == 0
    _, rows2 = data_rows(out2)
    assert abs(rows2[0, 1] - (-20.0)) < 1e-9


# ------------------------------------------------------------ config files

def test_config_file_roundtrip(tmp_path, capsys):
    cfg = preset("fig3-collapse")
    assert from_dict(to_dict(cfg)) == cfg
    path = tmp_path / "collapse.json"
    path.write_text(json.dumps(to_dict(cfg)))
    rc, out, _ = run_cli(capsys, ["classical", "--config", str(path),
                                  "--t-final", "0.5pi", "--samples", "5"])
    assert rc == 0
    assert float(meta_value(out, "init.a")) == 0.02
    assert float(meta_value(out, "params.v")) == 0.05


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    bad_group = tmp_path / "group.json"
    bad_group.write_text(json.dumps({"trap": {"u2": 0.25}}))
    rc, _, err = run_cli(capsys, ["classical", "--config", str(bad_group)])
    assert rc == 2 and "trap" in err

    bad_key = tmp_path / "key.json"
    bad_key.write_text(json.dumps({"params": {"u2": 0.25, "bogus": 1.0}}))
    rc, _, err = run_cli(capsys, ["classical", "--config", str(bad_key)])
    assert rc == 2 and "bogus" in err

    bad_type = tmp_path / "type.json"
    bad_type.write_text(json.dumps({"train": {"n": 2.5}}))
    rc, _, err = run_cli(capsys, ["classical", "--config", str(bad_type)])
    assert rc == 2

    rc, _, err = run_cli(capsys, ["classical", "--config",
                                  str(tmp_path / "missing.json")])
    assert rc == 2


def test_pi_unit_time_parsing():
    assert tuple(parse_pi_times("0,0.5pi,2pi")) == (0.0, 0.5 * math.pi,
                                                    2.0 * math.pi)
    assert tuple(parse_pi_times("pi")) == (math.pi,)
    assert tuple(parse_pi_times("1.5e0")) == (1.5,)
    for bad in ("abc", "1,,2", ""):
        with pytest.raises(ConfigError):
            parse_pi_times(bad)


# ----------------------------------------------------------------- verify

def test_verify_static_passes(capsys):
    rc, out, _ = run_cli(capsys, ["verify", "--preset", "static"])
    assert rc == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert len(report["checks"]) == 15
    assert all(ch["passed"] for ch in report["checks"])
    assert report["derived"]["c0"] == pytest.approx(1.0, abs=1e-12)


def test_verify_soliton_passes(capsys):
    rc, out, _ = run_cli(capsys, ["verify", "--preset", "fig2-soliton"])
    assert rc == 0
    report = json.loads(out)
    assert report["passed"] is True
    names = {ch["name"] for ch in report["checks"]}
    assert {"first-integral-drift", "picard-vs-rk4", "normalization",
            "orthogonality", "energy-affinity",
            "pde-density-distance"} <= names


def test_verify_fails_on_coarse_grid(capsys):
    rc, out, _ = run_cli(capsys, ["verify", "--preset", "static",
                                  "--grid-points", "32", "--half-width", "6"])
    assert rc == 1
    report = json.loads(out)
    assert report["passed"] is False
    failed = {ch["name"] for ch in report["checks"] if not ch["passed"]}
    assert "normalization" in failed


# --------------------------------------------------------- oracle-compare

def test_oracle_compare_within_tolerance(capsys):
    rc, out, _ = run_cli(capsys, ["oracle-compare", "--preset", "fig2-soliton",
                                  "--times", "0,0.5pi",
                                  "--grid-points", "1024"])
    assert rc == 0
    assert float(meta_value(out, "propagation.max_distance")) < 1e-3
    names, rows = data_rows(out)
    assert names == ["t", "density_distance", "fidelity"]
    assert float(np.min(rows[:, 2])) > 0.999


def test_oracle_compare_flag_validation(capsys):
    rc, _, err = run_cli(capsys, ["oracle-compare", "--preset", "static",
                                  "--times", "0.5", "--dt", "abc"])
    assert rc == 2
    rc, _, _ = run_cli(capsys, ["oracle-compare", "--preset", "static",
                                "--times", "0.5", "--dt", "-0.01"])
    assert rc == 2


def test_oracle_compare_fails_tight_tolerance(capsys):
    rc, out, _ = run_cli(capsys, ["oracle-compare", "--preset", "static",
                                  "--times", "0.5", "--grid-points", "512",
                                  "--tolerance", "1e-16"])
    assert rc == 1


# ----------------------------------------------------------- console script

@pytest.mark.skipif(shutil.which("wavetrains") is None,
                    reason="console script not on PATH")
def test_console_script_entry_point():
    proc = subprocess.run(["wavetrains", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "wavetrains 0.1.0"
    proc = subprocess.run(["wavetrains", "snapshot", "--preset", "static",
                           "--times", "0", "--n", "0", "--b0", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "# snapshot.0.nodes = 0" in proc.stdout
