"""Sweep runner and CLI tests: config validation, determinism, resume."""

import json

import pytest

from ionize.cli import main as cli_main
from ionize.sweep import (
    COLUMNS,
    CSV_SCHEMA_VERSION,
    ConfigError,
    SweepConfig,
    run,
    validate,
)

TRANSMON = {
    "schema_version": 1,
    "e_c_ghz": 0.1496,
    "e_j_ghz": [14.0286, -0.1425, 0.0084, -0.0023],
    "n_g": 0.0,
    "charge_cutoff": 40,
    "kept_levels": 12,
}


def write_config(tmp_path, mode, **extra):
    raw = {"mode": mode, "transmon": TRANSMON,
           "output_dir": str(tmp_path / "out"), **extra}
    path = tmp_path / f"{mode}.json"
    path.write_text(json.dumps(raw))
    return path


def dynamics_config(tmp_path, **extra):
    return write_config(
        tmp_path, "dynamics",
        device={"omega_r_ghz": 6.4043, "g_ghz": 0.060, "resonator_cutoff": 3},
        omega_d={"start": 1.3, "stop": 1.5, "count": 2},
        eps_d={"start": 0.5, "stop": 1.0, "count": 2},
        n_g={"start": 0.0, "stop": 0.0, "count": 1},
        pulse={"t_f_ns": 20.0, "t_ramp_ns": 2.0},
        **extra,
    )


def test_load_rejects_bad_mode(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"mode": "nonsense"}))
    with pytest.raises(ConfigError, match="mode"):
        SweepConfig.load(path)


def test_validate_reports_missing_axis(tmp_path):
    config = SweepConfig.load(write_config(tmp_path, "dynamics"))
    report = validate(config)
    assert report["problems"]
    assert report["cells"] == 0


def test_validate_rejects_bad_axes(tmp_path):
    path = write_config(
        tmp_path, "spectrum", n_g={"start": 0.5, "stop": 0.0, "count": 3})
    report = validate(SweepConfig.load(path))
    assert any("stop must exceed start" in p for p in report["problems"])
    path = write_config(
        tmp_path, "spectrum", n_g={"start": 0.0, "stop": 0.5, "count": 0})
    report = validate(SweepConfig.load(path))
    assert any("count" in p for p in report["problems"])


def test_validate_warns_on_coarse_threshold_grid(tmp_path):
    path = write_config(
        tmp_path, "threshold",
        omega_d={"start": 1.3, "stop": 1.3, "count": 1},
        eps_d={"start": 0.0, "stop": 2.0, "count": 11},
        n_g={"start": 0.0, "stop": 0.5, "count": 3})
    report = validate(SweepConfig.load(path))
    assert report["problems"] == []
    assert any("10 MHz" in w for w in report["warnings"])


def test_validate_estimates_runtime(tmp_path):
    config = SweepConfig.load(dynamics_config(tmp_path))
    report = validate(config)
    assert report["cells"] == 4
    assert report["estimated_seconds"] > 0


def test_spectrum_sweep_output(tmp_path):
    config = SweepConfig.load(write_config(
        tmp_path, "spectrum", n_g={"start": 0.0, "stop": 0.5, "count": 3}))
    assert run(config) == 0
    out = tmp_path / "out"
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS["spectrum"])
    # 3 offset charges x 12 kept levels of data rows.
    assert len(lines) == 1 + 3 * 12
    sidecar = json.loads((out / "spectrum.json").read_text())
    assert sidecar["schema_version"] == CSV_SCHEMA_VERSION
    assert sidecar["columns"] == COLUMNS["spectrum"]
    assert sidecar["config_hash"] == config.config_hash()


def test_dynamics_sweep_rows_and_determinism(tmp_path):
    config = SweepConfig.load(dynamics_config(tmp_path))
    assert run(config, workers=1) == 0
    first = (tmp_path / "out" / "dynamics.csv").read_bytes()
    rows = first.decode().splitlines()
    # 2 drive frequencies x 2 amplitudes x 1 offset charge x 12 levels.
    assert len(rows) == 1 + 2 * 2 * 12

    # Re-run from scratch with two workers: byte-identical output.
    for p in (tmp_path / "out").rglob("*"):
        if p.is_file():
            p.unlink()
    assert run(config, workers=2) == 0
    assert (tmp_path / "out" / "dynamics.csv").read_bytes() == first


def test_resume_recomputes_only_missing_cells(tmp_path):
    config = SweepConfig.load(dynamics_config(tmp_path))
    assert run(config) == 0
    out = tmp_path / "out"
    reference = (out / "dynamics.csv").read_bytes()
    parts = sorted((out / "parts").glob("*.csv"))
    assert len(parts) == 4

    # Simulate an interrupted run: drop one part and the merged file.
    victim = parts[1]
    victim.unlink()
    (out / "dynamics.csv").unlink()
    untouched = parts[0]
    stamp = untouched.stat().st_mtime_ns

    assert run(config, resume=True) == 0
    assert untouched.stat().st_mtime_ns == stamp  # not recomputed
    assert victim.exists()
    assert (out / "dynamics.csv").read_bytes() == reference
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["failed"] == {}
    assert all(v == "done" for v in manifest["completed"].values())


def test_resume_ignores_stale_manifest(tmp_path):
    config = SweepConfig.load(dynamics_config(tmp_path))
    assert run(config) == 0
    manifest_path = tmp_path / "out" / "manifest.json"
    manifest = json.loads(manifest_path.read_text())
    manifest["config_hash"] = "0" * 16
    manifest_path.write_text(json.dumps(manifest))
    assert run(config, resume=True) == 0
    fresh = json.loads(manifest_path.read_text())
    assert fresh["config_hash"] == config.config_hash()


def test_output_dir_env_override(tmp_path, monkeypatch):
    config = SweepConfig.load(write_config(
        tmp_path, "spectrum", n_g={"start": 0.0, "stop": 0.0, "count": 1}))
    override = tmp_path / "elsewhere"
    monkeypatch.setenv("IONIZE_OUTPUT_DIR", str(override))
    assert run(config) == 0
    assert (override / "spectrum.csv").exists()
    assert not (tmp_path / "out").exists()


def test_cli_validate_only(tmp_path, capsys):
    path = dynamics_config(tmp_path)
    assert cli_main(["dynamics", "--config", str(path), "--validate-only"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["problems"] == []
    assert report["cells"] == 4


def test_cli_mode_mismatch_exits_2(tmp_path, capsys):
    path = dynamics_config(tmp_path)
    assert cli_main(["floquet", "--config", str(path)]) == 2
    assert "does not match" in capsys.readouterr().err


def test_cli_missing_config_exits_2(tmp_path, capsys):
    assert cli_main(["dynamics", "--config", str(tmp_path / "nope.json")]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_point_overrides(tmp_path):
    path = dynamics_config(tmp_path)
    out = tmp_path / "single"
    assert cli_main([
        "dynamics", "--config", str(path),
        "--output-dir", str(out),
        "--omega-d-ghz", "1.4", "--eps-d-ghz", "0.8",
        "--t-f-ns", "15", "--t-ramp-ns", "3",
    ]) == 0
    lines = (out / "dynamics.csv").read_text().splitlines()
    assert len(lines) == 1 + 12  # one cell, one row per level
    assert all(line.startswith("1.4,0.8,") for line in lines[1:])
    sidecar = json.loads((out / "dynamics.json").read_text())
    assert sidecar["config"]["pulse"] == {"t_f_ns": 15, "t_ramp_ns": 3}
