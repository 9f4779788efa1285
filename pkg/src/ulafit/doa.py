"""Snapshot synthesis, coarray covariance processing, and spatial-smoothing MUSIC.

Positions are on the half-wavelength grid, so a sensor at integer position
``p`` sees the phase ``exp(j * pi * p * sin(theta))``.  The estimation
pipeline follows the standard coarray route: sample covariance, lag-domain
vectorization with redundancy averaging, forward spatial smoothing over
the central consecutive lags, then MUSIC on the virtual ULA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .coarray import report
from .coupling import CouplingModel, coupling_matrix
from .geometry import SparseArray


@dataclass(frozen=True)
class Scenario:
    """Inputs of one simulated estimation problem."""

    angles_deg: tuple[float, ...]
    powers: tuple[float, ...] | None = None
    noise_power: float = 1.0
    snapshots: int = 500
    coupling_enabled: bool = False
    master_seed: int = 0

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles_deg)
        object.__setattr__(self, "angles_deg", angles)
        if not angles:
            raise ValueError("need at least one source")
        if len(set(angles)) != len(angles):
            raise ValueError("source angles must be pairwise distinct")
        if any(not -90.0 < a < 90.0 for a in angles):
            raise ValueError("angles must lie strictly inside (-90, 90) degrees")
        if self.powers is not None:
            powers = tuple(float(p) for p in self.powers)
            if len(powers) != len(angles):
                raise ValueError("one power per source required")
            if any(p <= 0 for p in powers):
                raise ValueError("source powers must be positive")
            object.__setattr__(self, "powers", powers)
        if self.noise_power < 0:
            raise ValueError("noise power must be >= 0")
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot")

    @property
    def source_count(self) -> int:
        return len(self.angles_deg)

    def source_powers(self) -> np.ndarray:
        if self.powers is None:
            return np.ones(self.source_count)
        return np.asarray(self.powers)


@dataclass(frozen=True)
class MusicResult:
    """Pseudo-spectrum samples and the picked source angles."""

    grid_deg: np.ndarray
    spectrum: np.ndarray
    estimates: tuple[float, ...]
    missing: int


@dataclass(frozen=True)
class TrialStats:
    """Aggregated Monte-Carlo estimation accuracy."""

    rmse: float
    trials: int
    hit_rate: float


def _positions_array(positions) -> np.ndarray:
    if isinstance(positions, SparseArray):
        positions = positions.positions
    return np.asarray(sorted(positions), dtype=np.int64)


def trial_rng(master_seed: int, trial_index: int = 0) -> np.random.Generator:
    """Deterministic per-trial generator.

    Seeds are split as ``SeedSequence(master_seed, spawn_key=(trial_index,))``
    so results do not depend on trial execution order.
    """
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(trial_index,)))


def steering_matrix(positions, angles_deg) -> np.ndarray:
    """Steering matrix with entries ``exp(j pi p sin(theta))``, one column per angle."""
    pos = _positions_array(positions)
    theta = np.deg2rad(np.atleast_1d(np.asarray(angles_deg, dtype=float)))
    return np.exp(1j * np.pi * pos[:, None] * np.sin(theta)[None, :])


def synthesize(scenario: Scenario, positions, model: CouplingModel | None = None,
               trial_index: int = 0) -> np.ndarray:
    """Draw one block of snapshots ``x_l = C A s_l + n_l``.

    Sources and noise are i.i.d. circular complex Gaussian.  The coupling
    matrix is applied iff ``scenario.coupling_enabled``; a model must then
    be supplied.
    """
    pos = _positions_array(positions)
    if scenario.coupling_enabled and model is None:
        raise ValueError("coupling enabled but no coupling model given")
    rng = trial_rng(scenario.master_seed, trial_index)
    a = steering_matrix(pos, scenario.angles_deg)
    q, l = scenario.source_count, scenario.snapshots
    amp = np.sqrt(scenario.source_powers() / 2.0)[:, None]
    s = amp * (rng.standard_normal((q, l)) + 1j * rng.standard_normal((q, l)))
    x = a @ s
    if scenario.coupling_enabled:
        x = coupling_matrix(pos, model) @ x
    if scenario.noise_power > 0:
        sigma = math.sqrt(scenario.noise_power / 2.0)
        x = x + sigma * (rng.standard_normal((pos.size, l))
                         + 1j * rng.standard_normal((pos.size, l)))
    return x


def sample_covariance(snapshots: np.ndarray) -> np.ndarray:
    """Finite-sample covariance ``(1/L) X X^H``."""
    x = np.asarray(snapshots)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError(f"expected sensors x snapshots, got shape {x.shape}")
    r = x @ x.conj().T / x.shape[1]
    return (r + r.conj().T) / 2.0


def exact_covariance(positions, angles_deg, powers=None, noise_power: float = 0.0) -> np.ndarray:
    """Asymptotic covariance ``A diag(powers) A^H + noise_power * I``."""
    a = steering_matrix(positions, angles_deg)
    p = np.ones(a.shape[1]) if powers is None else np.asarray(powers, dtype=float)
    return (a * p) @ a.conj().T + noise_power * np.eye(a.shape[0])


def coarray_vector(r: np.ndarray, positions) -> dict[int, complex]:
    """Group covariance entries by lag with redundancy averaging.

    Entry ``R[m, n]`` is assigned to lag ``p_m - p_n``; entries sharing a
    lag are averaged, defining the virtual coarray signal on every lag of
    the difference coarray.
    """
    pos = _positions_array(positions)
    r = np.asarray(r)
    if r.shape != (pos.size, pos.size):
        raise ValueError(f"covariance shape {r.shape} does not match {pos.size} sensors")
    sums: dict[int, complex] = {}
    counts: dict[int, int] = {}
    lags = pos[:, None] - pos[None, :]
    for lag, value in zip(lags.ravel(), r.ravel()):
        lag = int(lag)
        sums[lag] = sums.get(lag, 0.0) + value
        counts[lag] = counts.get(lag, 0) + 1
    return {lag: sums[lag] / counts[lag] for lag in sorted(sums)}


def spatial_smoothing(coarray_values: Mapping[int, complex], j: int) -> np.ndarray:
    """Forward-smoothed covariance of the central consecutive coarray.

    From the virtual signal ``z`` on lags ``-j..j``, builds the
    ``(j+1) x (j+1)`` matrix averaging the outer products of the ``j+1``
    sliding subvectors, which restores rank for subspace processing.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    missing = [lag for lag in range(-j, j + 1) if lag not in coarray_values]
    if missing:
        raise ValueError(f"coarray holes within the smoothing range: {missing}")
    z = np.array([coarray_values[lag] for lag in range(-j, j + 1)])
    m = j + 1
    windows = np.lib.stride_tricks.sliding_window_view(z, m)  # row i = lags (i-j)..i
    rss = windows.T @ windows.conj() / m
    return (rss + rss.conj().T) / 2.0


def default_grid(step: float = 0.01) -> np.ndarray:
    """Uniform angle grid strictly inside (-90, 90) degrees."""
    n = int(round(180.0 / step)) - 1
    return -90.0 + step * np.arange(1, n + 1)


def music_spectrum(rss: np.ndarray, q: int, grid_deg=None,
                   steering=None) -> MusicResult:
    """MUSIC pseudo-spectrum on the virtual ULA and top-``q`` peak picking.

    The noise subspace spans the eigenvectors of the smallest
    ``dim - q`` eigenvalues.  Estimates are the angles of the ``q``
    largest strict local maxima (ties broken toward the lower angle),
    sorted ascending; fewer maxima than ``q`` are reported via ``missing``.
    """
    rss = np.asarray(rss)
    dim = rss.shape[0]
    if q >= dim:
        raise ValueError(f"too many sources: q={q} needs a smoothed matrix larger than {q}")
    grid = default_grid() if grid_deg is None else np.asarray(grid_deg, dtype=float)
    _, vecs = np.linalg.eigh(rss)  # ascending eigenvalues
    noise = vecs[:, : dim - q]
    if steering is None:
        steering = steering_matrix(np.arange(dim), grid)
    proj = noise.conj().T @ steering
    spectrum = 1.0 / np.einsum("ij,ij->j", proj.conj(), proj).real
    interior = spectrum[1:-1]
    peaks = 1 + np.nonzero((interior > spectrum[:-2]) & (interior > spectrum[2:]))[0]
    order = np.lexsort((grid[peaks], -spectrum[peaks]))
    chosen = peaks[order[:q]]
    estimates = tuple(sorted(float(grid[i]) for i in chosen))
    return MusicResult(grid, spectrum, estimates, q - len(estimates))


def estimate_from_covariance(r: np.ndarray, positions, q: int,
                             grid_deg=None, steering=None) -> MusicResult:
    """Full coarray-MUSIC pipeline from a covariance matrix."""
    pos = _positions_array(positions)
    j = report(pos).j_value
    values = coarray_vector(r, pos)
    rss = spatial_smoothing(values, j)
    return music_spectrum(rss, q, grid_deg, steering)


def run_trials(scenario: Scenario, positions, model: CouplingModel | None = None,
               trials: int = 500, grid_deg=None) -> list[MusicResult]:
    """Independent Monte-Carlo trials; deterministic given the master seed."""
    pos = _positions_array(positions)
    j = report(pos).j_value
    grid = default_grid() if grid_deg is None else np.asarray(grid_deg, dtype=float)
    steering = steering_matrix(np.arange(j + 1), grid)
    results = []
    for t in range(trials):
        x = synthesize(scenario, pos, model, trial_index=t)
        r = sample_covariance(x)
        results.append(estimate_from_covariance(
            r, pos, scenario.source_count, grid, steering))
    return results


def _greedy_match(estimates: Sequence[float], truth: Sequence[float]):
    """Nearest-first one-to-one assignment of estimates to true angles."""
    pairs = sorted(
        (abs(e - t), ei, ti)
        for ei, e in enumerate(estimates)
        for ti, t in enumerate(truth))
    used_e, used_t, matched = set(), set(), []
    for err, ei, ti in pairs:
        if ei in used_e or ti in used_t:
            continue
        used_e.add(ei)
        used_t.add(ti)
        matched.append((estimates[ei], truth[ti], err))
    return matched


def rmse_stats(estimate_sets: Sequence[Sequence[float]], truth: Sequence[float],
               gate: float = 1.0) -> TrialStats:
    """RMSE and hit rate over trials.

    Estimates are matched to the truth greedily by nearest angle.  The
    hit rate counts matches within ``gate`` degrees out of ``trials * Q``;
    missing estimates lower the hit rate but are excluded from the RMSE,
    whose denominator is the number of matched pairs.
    """
    truth = tuple(float(t) for t in truth)
    total_sq = 0.0
    n_matched = 0
    hits = 0
    for estimates in estimate_sets:
        for _, _, err in _greedy_match(tuple(estimates), truth):
            total_sq += err * err
            n_matched += 1
            if err <= gate:
                hits += 1
    trials = len(estimate_sets)
    rmse = math.sqrt(total_sq / n_matched) if n_matched else math.nan
    return TrialStats(rmse=rmse, trials=trials,
                      hit_rate=hits / (trials * len(truth)) if trials else 0.0)
