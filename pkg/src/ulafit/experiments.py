"""Experiment configurations, sweep runners, and CSV/manifest emission.

A sweep turns a config into one CSV per metric plus a JSON manifest that
echoes the config, the seed, the tool version, and a SHA-256 per output
file.  The manifest is written last and doubles as a completion marker;
partial outputs are removed if a run fails.  Re-running a config with the
same seed produces byte-identical CSV bodies.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import dataclass, fields, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .coarray import report
from .coupling import CouplingModel, coupling_matrix, coupling_leakage
from .doa import Scenario, default_grid, rmse_stats, run_trials
from .geometry import SparseArray, coprime, nested, uf3bl, uf4bl

GEOMETRY_NAMES = ("uf3bl", "uf4bl", "nested", "coprime")

# Multiplier for deriving per-sweep-point seeds from the master seed.
_POINT_SEED_STRIDE = 1_000_003


def best_coprime_pair(n: int) -> tuple[int, int]:
    """Coprime (m, n') with 2m + n' - 1 == n sensors maximizing the coarray J.

    Ties break toward the smaller m for reproducibility.
    """
    best = None
    for m in range(1, (n + 1) // 3 + 1):
        n2 = n + 1 - 2 * m
        if n2 <= m or math.gcd(m, n2) != 1:
            continue
        j = report(coprime(m, n2)).j_value
        if best is None or j > best[0]:
            best = (j, m, n2)
    if best is None:
        raise ValueError(f"no coprime pair yields {n} sensors")
    return best[1], best[2]


def build_geometry(name: str, n: int) -> SparseArray:
    """Construct a registered geometry with ``n`` sensors."""
    if name == "uf3bl":
        return uf3bl(n)
    if name == "uf4bl":
        return uf4bl(n)
    if name == "nested":
        if n < 2:
            raise ValueError("nested array needs at least 2 sensors")
        return nested(n // 2, n - n // 2)
    if name == "coprime":
        m, n2 = best_coprime_pair(n)
        return coprime(m, n2)
    raise ValueError(f"unknown geometry {name!r}; known: {', '.join(GEOMETRY_NAMES)}")


SWEEP_KINDS = ("udof-sweep", "efficiency-sweep", "leakage-sweep",
               "rmse-vs-snr", "rmse-vs-sources", "rmse-vs-c1")
ALL_KINDS = SWEEP_KINDS + ("identifiability",)


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat experiment description; see README for the file schema."""

    kind: str
    geometries: tuple[str, ...] = ("uf3bl",)
    n_values: tuple[int, ...] = (17,)
    c1_mag: float = 0.5
    c1_phase: float = math.pi / 3
    band: int = 100
    coupling_enabled: bool = False
    snr_db: tuple[float, ...] = (0.0,)
    source_counts: tuple[int, ...] = (10,)
    c1_mags: tuple[float, ...] = (0.1, 0.3, 0.5)
    q: int = 10
    angle_min_deg: float = -60.0
    angle_max_deg: float = 60.0
    snapshots: int = 500
    trials: int = 500
    grid_step_deg: float = 0.01
    gate_deg: float = 1.0
    master_seed: int = 0
    out_dir: str = "results"

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}; known: {', '.join(ALL_KINDS)}")
        for name in ("geometries", "n_values", "snr_db", "source_counts", "c1_mags"):
            value = getattr(self, name)
            seq = tuple(value) if isinstance(value, (list, tuple)) else (value,)
            if not seq:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, seq)
        for g in self.geometries:
            if g not in GEOMETRY_NAMES:
                raise ValueError(f"unknown geometry {g!r}; known: {', '.join(GEOMETRY_NAMES)}")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**mapping)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh))

    def coupling_model(self, c1_mag: float | None = None) -> CouplingModel:
        mag = self.c1_mag if c1_mag is None else c1_mag
        return CouplingModel(mag * complex(math.cos(self.c1_phase),
                                           math.sin(self.c1_phase)), self.band)

    def source_angles(self, q: int | None = None) -> tuple[float, ...]:
        q = self.q if q is None else q
        return tuple(np.linspace(self.angle_min_deg, self.angle_max_deg, q))


def _point_seed(master_seed: int, point_index: int) -> int:
    return master_seed * _POINT_SEED_STRIDE + point_index


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(v) for v in row])


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _run_point(config: ExperimentConfig, geometry: str, n: int, q: int,
               snr_db: float, model: CouplingModel | None, point_index: int):
    array = build_geometry(geometry, n)
    angles = config.source_angles(q)
    scenario = Scenario(
        angles_deg=angles,
        noise_power=10.0 ** (-snr_db / 10.0),
        snapshots=config.snapshots,
        coupling_enabled=model is not None,
        master_seed=_point_seed(config.master_seed, point_index),
    )
    grid = default_grid(config.grid_step_deg)
    results = run_trials(scenario, array, model, trials=config.trials, grid_deg=grid)
    stats = rmse_stats([r.estimates for r in results], angles, gate=config.gate_deg)
    return results, stats


def _sweep_rows(config: ExperimentConfig):
    """Yield (csv name, header, rows) for the configured sweep kind."""
    kind = config.kind
    if kind in ("udof-sweep", "efficiency-sweep", "leakage-sweep"):
        rows = []
        for geometry in config.geometries:
            for n in config.n_values:
                array = build_geometry(geometry, n)
                if kind == "udof-sweep":
                    rows.append((geometry, n, report(array).udof))
                elif kind == "efficiency-sweep":
                    rows.append((geometry, n, float(report(array).spatial_efficiency)))
                else:
                    model = config.coupling_model()
                    leak = coupling_leakage(coupling_matrix(array.positions, model))
                    rows.append((geometry, n, leak))
        metric = {"udof-sweep": "udof", "efficiency-sweep": "spatial_efficiency",
                  "leakage-sweep": "coupling_leakage"}[kind]
        return f"{metric}.csv", ["geometry", "n", metric], rows
    n = config.n_values[0]
    model = config.coupling_model() if config.coupling_enabled else None
    rows = []
    point = 0
    if kind == "rmse-vs-snr":
        for geometry in config.geometries:
            for snr in config.snr_db:
                _, stats = _run_point(config, geometry, n, config.q, snr, model, point)
                rows.append((geometry, snr, stats.rmse, stats.hit_rate))
                point += 1
        return "rmse_vs_snr.csv", ["geometry", "snr_db", "rmse_deg", "hit_rate"], rows
    if kind == "rmse-vs-sources":
        for geometry in config.geometries:
            for q in config.source_counts:
                _, stats = _run_point(config, geometry, n, q, config.snr_db[0], model, point)
                rows.append((geometry, q, stats.rmse, stats.hit_rate))
                point += 1
        return "rmse_vs_sources.csv", ["geometry", "sources", "rmse_deg", "hit_rate"], rows
    if kind == "rmse-vs-c1":
        for geometry in config.geometries:
            for mag in config.c1_mags:
                _, stats = _run_point(config, geometry, n, config.q, config.snr_db[0],
                                      config.coupling_model(mag), point)
                rows.append((geometry, mag, stats.rmse, stats.hit_rate))
                point += 1
        return "rmse_vs_c1.csv", ["geometry", "c1_mag", "rmse_deg", "hit_rate"], rows
    raise ValueError(f"{kind!r} is not a sweep kind")


def _finalize(config: ExperimentConfig, out_dir: Path, written: list[Path],
              started: float) -> Path:
    manifest = {
        "tool": "ulafit",
        "version": __version__,
        "kind": config.kind,
        "master_seed": config.master_seed,
        "wall_clock_s": round(time.monotonic() - started, 3),
        "config": asdict(config),
        "outputs": {p.name: _sha256(p) for p in written},
    }
    path = out_dir / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def run_sweep(config: ExperimentConfig) -> Path:
    """Run a sweep config; returns the manifest path."""
    if config.kind not in SWEEP_KINDS:
        raise ValueError(f"kind {config.kind!r} is not a sweep; use run_identify")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    written: list[Path] = []
    try:
        name, header, rows = _sweep_rows(config)
        path = out_dir / name
        _write_csv(path, header, rows)
        written.append(path)
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return _finalize(config, out_dir, written, started)


def run_identify(config: ExperimentConfig) -> Path:
    """Identifiability run: spectrum and estimate CSVs per geometry."""
    if config.kind != "identifiability":
        raise ValueError(f"kind {config.kind!r} is not an identifiability config")
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    n = config.n_values[0]
    model = config.coupling_model() if config.coupling_enabled else None
    angles = config.source_angles()
    written: list[Path] = []
    try:
        for point, geometry in enumerate(config.geometries):
            results, stats = _run_point(config, geometry, n, config.q,
                                        config.snr_db[0], model, point)
            first = results[0]
            spec_path = out_dir / f"spectrum_{geometry}.csv"
            _write_csv(spec_path, ["angle_deg", "pseudo_spectrum"],
                       list(zip(first.grid_deg.tolist(), first.spectrum.tolist())))
            written.append(spec_path)
            est_rows = []
            for trial, result in enumerate(results):
                for estimate in result.estimates:
                    est_rows.append((geometry, trial, estimate))
            est_path = out_dir / f"estimates_{geometry}.csv"
            _write_csv(est_path, ["geometry", "trial", "estimate_deg"], est_rows)
            written.append(est_path)
            truth_path = out_dir / "true_angles.csv"
            _write_csv(truth_path, ["true_deg"], [(a,) for a in angles])
            if truth_path not in written:
                written.append(truth_path)
            summary_path = out_dir / "summary.csv"
            row = (geometry, stats.rmse, stats.hit_rate)
            _append_summary(summary_path, row, fresh=(point == 0))
            if summary_path not in written:
                written.append(summary_path)
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return _finalize(config, out_dir, written, started)


def _append_summary(path: Path, row: tuple, fresh: bool) -> None:
    mode = "w" if fresh else "a"
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(["geometry", "rmse_deg", "hit_rate"])
        writer.writerow([_format(v) for v in row])
