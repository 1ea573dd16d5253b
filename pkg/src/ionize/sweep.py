"""Sweep orchestration: grid execution, checkpointing, stable outputs.

A sweep is a grid of independent cells (one dynamics run, one Floquet
tracking run, ...).  Each completed cell lands as its own part file via an
atomic rename, the manifest records the completed cell set, and re-running
with the same config resumes from the manifest.  The merged CSV is sorted,
so output bytes do not depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .floquet import track_branches
from .params import DeviceParams, ParameterError, TransmonParams
from .propagate import PulseExperimentSpec, pulse_experiment
from .pulse import DrivePulse
from .rotor import RotorParams, poincare_section
from .specfit import fit_parameters, fit_series_inductance, load_measurements
from .threshold import branch_threshold, chaotic_cluster_stat
from .transmon import transmon_eigensystem

MODES = ("dynamics", "floquet", "threshold", "classical", "spectrum", "fit")
CSV_SCHEMA_VERSION = 1

COLUMNS = {
    "dynamics": ["omega_d_ghz", "eps_d_ghz", "n_g", "level", "probability",
                 "norm_deficit"],
    "floquet": ["omega_d_ghz", "n_g", "eps_d_ghz", "branch_label",
                "quasienergy_ghz", "avg_population", "continuity_warning"],
    "threshold": ["omega_d_ghz", "label", "eps_threshold_ghz", "M",
                  "cluster_size"],
    "classical": ["eps_d_ghz", "trajectory_id", "k", "phi", "n"],
    "spectrum": ["n_g", "level", "energy_ghz"],
}


class ConfigError(ValueError):
    pass


def _axis(spec: dict, name: str) -> np.ndarray:
    try:
        start, stop, count = spec["start"], spec["stop"], int(spec["count"])
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"axis {name!r} needs start/stop/count") from exc
    if count < 1:
        raise ConfigError(f"axis {name!r}: count must be >= 1")
    if count > 1 and not stop > start:
        raise ConfigError(f"axis {name!r}: stop must exceed start")
    return np.linspace(start, stop, count)


@dataclass(frozen=True)
class SweepConfig:
    mode: str
    raw: dict

    @classmethod
    def load(cls, path) -> "SweepConfig":
        with open(path) as fh:
            raw = json.load(fh)
        mode = raw.get("mode")
        if mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {mode!r}")
        return cls(mode=mode, raw=raw)

    @property
    def output_dir(self) -> Path:
        env = os.environ.get("IONIZE_OUTPUT_DIR")
        return Path(env or self.raw.get("output_dir", "ionize-out"))

    def config_hash(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True).encode()
        return hashlib.sha256(canon).hexdigest()[:16]

    def transmon(self, n_g: float = 0.0) -> TransmonParams:
        return TransmonParams.from_dict(self.raw["transmon"]).with_ng(n_g)

    def device(self, n_g: float = 0.0) -> DeviceParams:
        d = dict(self.raw["device"])
        return DeviceParams(
            transmon=self.transmon(n_g),
            omega_r=d["omega_r_ghz"],
            g=d["g_ghz"],
            resonator_cutoff=d.get("resonator_cutoff", 6),
        )

    def pulse(self, omega_d: float, eps_d: float) -> DrivePulse:
        p = self.raw.get("pulse", {})
        return DrivePulse(
            eps_d=eps_d, omega_d=omega_d,
            t_f=p.get("t_f_ns", 100.0), t_ramp=p.get("t_ramp_ns", 5.0),
            c1=p.get("c1", 0.01),
        )


def _cells(config: SweepConfig):
    """Cell keys and payloads for every mode; keys sort deterministically."""
    raw = config.raw
    mode = config.mode
    if mode == "dynamics":
        omega = _axis(raw["omega_d"], "omega_d")
        eps = _axis(raw["eps_d"], "eps_d")
        ng = _axis(raw["n_g"], "n_g")
        return [(f"w{w:.9g}_e{e:.9g}_g{g:.9g}", (float(w), float(e), float(g)))
                for w in omega for e in eps for g in ng]
    if mode == "floquet":
        omega = _axis(raw["omega_d"], "omega_d")
        ng = _axis(raw["n_g"], "n_g")
        return [(f"w{w:.9g}_g{g:.9g}", (float(w), float(g)))
                for w in omega for g in ng]
    if mode == "threshold":
        omega = _axis(raw["omega_d"], "omega_d")
        return [(f"w{w:.9g}", (float(w),)) for w in omega]
    if mode == "classical":
        eps = _axis(raw["eps_d"], "eps_d")
        return [(f"e{e:.9g}", (float(e),)) for e in eps]
    if mode == "spectrum":
        ng = _axis(raw["n_g"], "n_g")
        return [(f"g{g:.9g}", (float(g),)) for g in ng]
    if mode == "fit":
        return [("fit", ())]
    raise ConfigError(mode)


def _run_cell(config: SweepConfig, key: str, payload) -> list[list]:
    """Compute one cell's CSV rows."""
    raw = config.raw
    mode = config.mode
    if mode == "dynamics":
        omega_d, eps_d, n_g = payload
        label = tuple(raw.get("initial_label", (0, 0)))
        spec = PulseExperimentSpec(
            device=config.device(n_g), pulse=config.pulse(omega_d, eps_d),
            initial_label=label, n_g_values=(n_g,),
            rtol=raw.get("rtol", 1e-10), atol=raw.get("atol", 1e-12),
        )
        dist = pulse_experiment(spec, n_g)
        return [[omega_d, eps_d, n_g, lvl, float(p), dist.norm_deficit]
                for lvl, p in enumerate(dist.probabilities)]
    if mode == "floquet":
        omega_d, n_g = payload
        eps = _axis(raw["eps_d"], "eps_d")
        step = eps[1] - eps[0] if len(eps) > 1 else 0.010
        branches = track_branches(
            config.transmon(n_g), omega_d, float(eps[-1]), step=float(step),
            tracked_levels=raw.get("tracked_levels"))
        rows = []
        for b, label in enumerate(branches.labels):
            for k, eps_d in enumerate(branches.eps_d_grid):
                rows.append([omega_d, n_g, float(eps_d), int(label),
                             float(branches.quasienergies[b, k]),
                             float(branches.populations[b, k]),
                             int(branches.continuity_warnings[b, k])])
        return rows
    if mode == "threshold":
        (omega_d,) = payload
        from .floquet import ng_averaged_populations
        eps = _axis(raw["eps_d"], "eps_d")
        step = eps[1] - eps[0] if len(eps) > 1 else 0.010
        ng = _axis(raw["n_g"], "n_g")
        averaged = ng_averaged_populations(
            config.transmon(), omega_d, float(eps[-1]), ng, step=float(step),
            tracked_levels=raw.get("tracked_levels"))
        rows = []
        cluster_levels = int(raw.get("cluster_levels")
                             or min(20, len(averaged.labels)))
        for label in raw.get("labels", [0]):
            result = branch_threshold(averaged, int(label),
                                      cluster_levels=cluster_levels)
            if result.eps_threshold is None:
                thresh, m_val, size = "", "", ""
            else:
                thresh = result.eps_threshold
                idx = int(np.argmin(np.abs(averaged.eps_d_grid - thresh)))
                stat = chaotic_cluster_stat(
                    averaged.populations[:cluster_levels, idx])
                m_val, size = stat.mean_population, stat.sizes[1]
            rows.append([omega_d, int(label), thresh, m_val, size])
        return rows
    if mode == "classical":
        (eps_d,) = payload
        rp = raw["rotor"]
        params = RotorParams(
            omega_p=rp["omega_p_ghz"], c_m=tuple(rp.get("c_m", (1.0,))),
            z=rp["z"], eps_d=eps_d, omega_d=rp.get("omega_d_ghz", 1.75))
        ics = np.array(raw["initial_conditions"], dtype=float)
        section = poincare_section(ics, params, int(raw.get("n_periods", 200)))
        rows = []
        for tid, traj in enumerate(section.points):
            for k, (phi, n) in enumerate(traj):
                rows.append([eps_d, tid, k, float(phi), float(n)])
        return rows
    if mode == "spectrum":
        (n_g,) = payload
        eig = transmon_eigensystem(config.transmon(n_g))
        return [[n_g, int(lvl), float(e)]
                for lvl, e in zip(eig.labels, eig.energies)]
    if mode == "fit":
        data = load_measurements(raw["data_file"])
        variant = raw.get("variant", "n4")
        if variant == "series-l":
            result = fit_series_inductance(data)
        else:
            result = fit_parameters(data, variant)
        out = config.output_dir / "fit_result.json"
        _atomic_write(out, json.dumps(result.to_dict(), indent=2, sort_keys=True))
        return []
    raise ConfigError(mode)


def _atomic_write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _format(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_part(path: Path, rows: list[list]):
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    os.replace(tmp, path)


def _load_manifest(path: Path) -> dict:
    if path.exists():
        with open(path) as fh:
            return json.load(fh)
    return {}


def validate(config: SweepConfig) -> dict:
    """Static sanity report: axis checks, cell count, runtime estimate."""
    problems, warnings = [], []
    try:
        cells = _cells(config)
    except (ConfigError, KeyError) as exc:
        return {"problems": [str(exc)], "warnings": [], "cells": 0,
                "estimated_seconds": 0.0}
    per_cell = {"dynamics": 10.0, "floquet": 20.0, "threshold": 120.0,
                "classical": 5.0, "spectrum": 0.1, "fit": 60.0}[config.mode]
    if config.mode == "threshold":
        eps = _axis(config.raw["eps_d"], "eps_d")
        if len(eps) > 1 and eps[1] - eps[0] > 0.010 + 1e-12:
            warnings.append(
                "eps_d step exceeds the 10 MHz tracking increment; "
                "thresholds may skip relevant avoided crossings")
    if config.mode == "dynamics" and config.raw.get("eps_d", {}).get("count", 1) == 0:
        problems.append("empty eps_d axis")
    return {
        "problems": problems,
        "warnings": warnings,
        "cells": len(cells),
        "estimated_seconds": per_cell * len(cells),
    }


def run(config: SweepConfig, workers: int = 1, resume: bool = False) -> int:
    """Execute the sweep; returns a process exit status."""
    out_dir = config.output_dir
    parts_dir = out_dir / "parts"
    parts_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.json"
    manifest = _load_manifest(manifest_path) if resume else {}
    if manifest and manifest.get("config_hash") != config.config_hash():
        manifest = {}
    manifest.setdefault("config_hash", config.config_hash())
    manifest.setdefault("version", __version__)
    manifest.setdefault("mode", config.mode)
    manifest.setdefault("completed", {})
    manifest.setdefault("failed", {})
    manifest["config"] = config.raw

    cells = _cells(config)
    pending = [(key, payload) for key, payload in cells
               if manifest["completed"].get(key) != "done"
               or not (parts_dir / f"{key}.csv").exists()]

    def finish(key, rows, error=None):
        if error is None:
            _write_part(parts_dir / f"{key}.csv", rows)
            manifest["completed"][key] = "done"
            manifest["failed"].pop(key, None)
        else:
            manifest["failed"][key] = error
        _atomic_write(manifest_path, json.dumps(manifest, indent=2, sort_keys=True))

    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {pool.submit(_run_cell, config, key, payload): key
                       for key, payload in pending}
            for future, key in futures.items():
                try:
                    finish(key, future.result())
                except Exception as exc:  # noqa: BLE001 - recorded per cell
                    finish(key, None, error=str(exc))
    else:
        for key, payload in pending:
            try:
                finish(key, _run_cell(config, key, payload))
            except Exception as exc:  # noqa: BLE001 - recorded per cell
                finish(key, None, error=str(exc))

    if config.mode != "fit":
        all_rows = []
        for key, _ in cells:
            part = parts_dir / f"{key}.csv"
            if part.exists():
                with open(part, newline="") as fh:
                    all_rows.extend(list(csv.reader(fh)))
        all_rows.sort(key=lambda r: [_sort_key(v) for v in r])
        final = out_dir / f"{config.mode}.csv"
        tmp_rows = [",".join(COLUMNS[config.mode])]
        tmp_rows += [",".join(r) for r in all_rows]
        _atomic_write(final, "\n".join(tmp_rows) + "\n")
        sidecar = {
            "schema_version": CSV_SCHEMA_VERSION,
            "mode": config.mode,
            "columns": COLUMNS[config.mode],
            "config": config.raw,
            "config_hash": config.config_hash(),
            "version": __version__,
        }
        _atomic_write(out_dir / f"{config.mode}.json",
                      json.dumps(sidecar, indent=2, sort_keys=True))

    return 1 if manifest["failed"] else 0


def _sort_key(value: str):
    try:
        return (0, float(value), "")
    except ValueError:
        return (1, 0.0, value)
