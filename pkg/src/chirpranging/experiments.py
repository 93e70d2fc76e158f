"""
Monte Carlo, receiver-grid, PPF and estimator-comparison experiments.

Every noise draw is seeded from ``(master_seed, receiver index, trial)``
only, so results do not depend on how work is split across processes.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np
import scipy.optimize

from .errors import ParameterError
from .estimators import (DEFAULT_ESTIMATORS, EstimatorSpec, Method,
                         estimate_distances)
from .ranging import TimingSpec
from .room import RoomSpec, clean_reception, receive
from .signals import ChirpSpec, NoiseSpec, generate_chirp
from .stats import epanechnikov_kde, error_metrics, gaussian_fit

log = logging.getLogger(__name__)

PPF_BAND_MARGIN = 0.25
FLAGSHIP_DISTANCE = 1.553


@dataclass(frozen=True)
class GridSpec:
    """`nx` by `ny` receivers, `spacing` apart, starting `margin` from two walls."""

    nx: int = 15
    ny: int = 10
    spacing: float = 0.2
    margin: float = 0.1
    z: float = 1.0

    def points(self):
        return [(self.margin + ix * self.spacing, self.margin + iy * self.spacing, self.z)
                for iy in range(self.ny) for ix in range(self.nx)]

    @property
    def shape(self):
        return (self.ny, self.nx)


DESK_GRID = GridSpec(15, 10, 0.2, 0.1, 1.0)
FULL_GRID = GridSpec(30, 20, 0.1, 0.1, 1.0)
DESK_TRIALS = 1000
FULL_TRIALS = 10000


@dataclass(frozen=True)
class ExperimentConfig:
    room: RoomSpec = field(default_factory=RoomSpec)
    chirp: ChirpSpec = field(default_factory=ChirpSpec)
    timing: TimingSpec = field(default_factory=TimingSpec)
    source: tuple = None
    receivers: object = DESK_GRID
    snr_db: object = math.inf
    estimators: tuple = DEFAULT_ESTIMATORS
    trials: int = 1
    master_seed: int = 0
    bits: int = 12
    max_order: int = None
    workers: int = 1

    def __post_init__(self):
        if self.source is None:
            object.__setattr__(self, "source", self.room.default_source())
        object.__setattr__(self, "source", tuple(float(v) for v in self.source))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))

    def problems(self):
        out = []
        if self.trials < 1:
            out.append(f"trials must be >= 1, got {self.trials}")
        if not self.estimators:
            out.append("at least one estimator is required")
        points = self.receiver_points()
        if not points:
            out.append("receivers must not be empty")
        if not self.room.contains(self.source):
            out.append(f"source {self.source} is not inside the room")
        outside = [p for p in points if not self.room.contains(p)]
        if outside:
            out.append(f"{len(outside)} receiver(s) outside the room, e.g. {outside[0]}")
        if self.chirp.sample_rate != self.timing.sample_rate:
            out.append("chirp and timing sample rates differ")
        if self.chirp.tau_tx != self.timing.tau_tx:
            out.append("chirp and timing broadcast durations differ")
        if self.room.speed_of_sound != self.timing.speed_of_sound:
            out.append("room and timing speeds of sound differ")
        return out

    def receiver_points(self):
        if isinstance(self.receivers, GridSpec):
            return self.receivers.points()
        return [tuple(float(v) for v in p) for p in self.receivers]

    @property
    def grid(self):
        return self.receivers if isinstance(self.receivers, GridSpec) else None


@dataclass(frozen=True)
class ResultRecord:
    receiver: tuple
    true_distance: float
    estimator: str
    estimated_distance: float
    abs_error: float
    trial: int
    snr_db: float


def trial_seed(master_seed, receiver_index, trial):
    """64-bit noise seed derived from the work item's identity only."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(receiver_index), int(trial)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def flagship_receiver(source, distance=FLAGSHIP_DISTANCE):
    """Receiver `distance` meters from `source` towards the room origin, same height."""
    s = np.asarray(source, dtype=float)
    direction = np.array([-1.0, -1.0, 0.0]) / math.sqrt(2.0)
    return tuple((s + distance * direction).tolist())


def _map(fn, items, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
    return [fn(it) for it in items]


def _receiver_trace(cfg, receiver):
    t = cfg.timing
    return clean_reception(cfg.chirp, cfg.room, cfg.source, receiver,
                           t.wake_offset, t.tau_rx, cfg.max_order)


def _estimate_trial(cfg, trace, template, snr_db, seed, specs):
    t = cfg.timing
    snippet = receive(trace, NoiseSpec(snr_db, seed), t.wake_offset, t.tau_rx, cfg.bits)
    return estimate_distances(snippet, template, t, specs)


def _receiver_job(job):
    cfg, index, receiver, snr_db, specs = job
    template = generate_chirp(cfg.chirp)
    trace = _receiver_trace(cfg, receiver)
    return [_estimate_trial(cfg, trace, template, snr_db,
                            trial_seed(cfg.master_seed, index, trial), specs)
            for trial in range(cfg.trials)]


def _trial_job(job):
    cfg, trace, snr_db, trials, specs = job
    template = generate_chirp(cfg.chirp)
    return [_estimate_trial(cfg, trace, template, snr_db, trial_seed(cfg.master_seed, 0, k), specs)
            for k in trials]


def _records(receiver, true_d, specs, per_trial, snr_db):
    # receiver-major, then estimator, then trial
    out = []
    for j, spec in enumerate(specs):
        for trial, dists in enumerate(per_trial):
            est = float(dists[j])
            out.append(ResultRecord(receiver, true_d, spec.label, est,
                                    abs(est - true_d), trial, snr_db))
    return out


def summarize(records, labels):
    """ErrorStats per estimator label (absolute errors; Gaussian fit on signed)."""
    stats = {}
    for label in labels:
        rows = [r for r in records if r.estimator == label]
        if not rows:
            continue
        signed = [r.estimated_distance - r.true_distance for r in rows]
        stats[label] = error_metrics([r.abs_error for r in rows], signed=signed)
    return stats


@dataclass
class MonteCarloResult:
    records: list
    stats: dict
    fits: dict
    densities: dict
    true_distance: float


def run_monte_carlo(cfg):
    """Repeat noise, window, correlate and estimate for one receiver.

    The impulse response and clean trace are computed once and reused by
    every trial. Returns per-estimator ErrorStats (epsilon and sigma from
    the Gaussian fit of the estimates), the fit itself and an Epanechnikov
    density of the estimates.
    """
    points = cfg.receiver_points()
    if len(points) != 1:
        raise ParameterError(f"Monte Carlo needs exactly one receiver, got {len(points)}")
    snr = _single_snr(cfg.snr_db)
    receiver = points[0]
    true_d = math.dist(cfg.source, receiver)
    trace = _receiver_trace(cfg, receiver)
    chunks = np.array_split(np.arange(cfg.trials), max(1, cfg.workers * 4))
    jobs = [(cfg, trace, snr, [int(k) for k in c], cfg.estimators) for c in chunks if len(c)]
    per_trial = [row for part in _map(_trial_job, jobs, cfg.workers) for row in part]
    records = _records(receiver, true_d, cfg.estimators, per_trial, snr)
    labels = [s.label for s in cfg.estimators]
    stats = summarize(records, labels)
    fits, densities = {}, {}
    for j, label in enumerate(labels):
        est = np.array([row[j] for row in per_trial])
        if est.size >= 2:
            fits[label] = gaussian_fit(est)
        else:
            fits[label] = (float(est[0]), 0.0)
        densities[label] = epanechnikov_kde(est) if np.ptp(est) > 0 else None
    log.info("monte carlo: %d trials at %s dB", cfg.trials, snr)
    return MonteCarloResult(records, stats, fits, densities, true_d)


def _single_snr(snr_db):
    if isinstance(snr_db, (list, tuple)):
        if len(snr_db) != 1:
            raise ParameterError("expected a single SNR value")
        return float(snr_db[0])
    return float(snr_db)


@dataclass
class GridResult:
    records: list
    stats: dict
    heatmaps: dict
    snr_db: float


def run_grid_sweep(cfg, snr_db=None):
    """One estimate per receiver, estimator and trial over the receiver set.

    Heatmaps (shape ``(ny, nx)``, trial-averaged absolute error) are only
    produced when the receivers come from a GridSpec.
    """
    snr = _single_snr(cfg.snr_db if snr_db is None else snr_db)
    points = cfg.receiver_points()
    jobs = [(cfg, i, p, snr, cfg.estimators) for i, p in enumerate(points)]
    results = _map(_receiver_job, jobs, cfg.workers)
    records = []
    for p, per_trial in zip(points, results):
        records.extend(_records(p, math.dist(cfg.source, p), cfg.estimators, per_trial, snr))
    labels = [s.label for s in cfg.estimators]
    stats = summarize(records, labels)
    heatmaps = {}
    if cfg.grid is not None:
        n = len(points)
        for label in labels:
            err = np.array([r.abs_error for r in records if r.estimator == label])
            heatmaps[label] = err.reshape(n, cfg.trials).mean(axis=1).reshape(cfg.grid.shape)
    log.info("grid sweep: %d receivers at %s dB", len(points), snr)
    return GridResult(records, stats, heatmaps, snr)


@dataclass
class PPFSweepResult:
    ppf_values: list
    stats: dict            # {snr: {ppf: ErrorStats}}
    bands: dict            # {snr: [ppf, ...]} within the P95 margin of the best
    optimum: dict          # {snr: ppf with the smallest P95}
    fit: tuple = None      # (a, b, c) of ppf_opt = a exp(b snr) + c


def optimal_band(ppf_values, p95, margin=PPF_BAND_MARGIN):
    """PPF values whose P95 lies within `margin` of the smallest P95."""
    best = min(p95)
    return [p for p, v in zip(ppf_values, p95) if v <= best + margin]


def fit_ppf_curve(snrs, ppfs):
    """Least-squares fit of ``ppf = a * exp(b * snr) + c``."""
    snrs = np.asarray(snrs, dtype=float)
    ppfs = np.asarray(ppfs, dtype=float)
    if snrs.size < 3:
        raise ParameterError("fitting the PPF curve needs at least 3 SNR values")

    def model(s, a, b, c):
        return a * np.exp(b * s) + c

    span = max(ppfs.max() - ppfs.min(), 1.0)
    p0 = (-span, -0.1, ppfs.max())
    params, _ = scipy.optimize.curve_fit(model, snrs, ppfs, p0=p0, maxfev=20000)
    return tuple(float(v) for v in params)


def run_ppf_sweep(cfg, ppf_values, snr_list=None):
    """Prominence-method statistics for each PPF value (and SNR).

    Each receiver's correlation is computed once per trial and shared by
    all PPF values.
    """
    ppf_values = [float(p) for p in ppf_values]
    if not ppf_values:
        raise ParameterError("ppf_values must not be empty")
    if snr_list is None:
        snr_list = cfg.snr_db if isinstance(cfg.snr_db, (list, tuple)) else [cfg.snr_db]
    specs = tuple(EstimatorSpec(Method.PROMINENCE, ppf=p) for p in ppf_values)
    sub = replace(cfg, estimators=specs)
    stats, bands, optimum = {}, {}, {}
    for snr in snr_list:
        res = run_grid_sweep(sub, snr)
        per = {p: res.stats[s.label] for p, s in zip(ppf_values, specs)}
        stats[snr] = per
        p95 = [per[p].p95 for p in ppf_values]
        bands[snr] = optimal_band(ppf_values, p95)
        optimum[snr] = ppf_values[int(np.argmin(p95))]
    fit = None
    finite = [s for s in snr_list if math.isfinite(s)]
    if len(finite) >= 3:
        try:
            fit = fit_ppf_curve(finite, [optimum[s] for s in finite])
        except RuntimeError:
            log.warning("PPF curve fit did not converge")
    return PPFSweepResult(ppf_values, stats, bands, optimum, fit)


@dataclass
class ComparisonResult:
    snr_list: list
    labels: list
    stats: dict            # {(label, snr): ErrorStats}
    grids: dict            # {snr: GridResult}

    def table(self):
        """Rows of (label, metric, values per SNR) shaped like the SNR table."""
        rows = []
        for label in self.labels:
            for metric in ("mean", "p50", "p95"):
                rows.append((label, metric,
                             [getattr(self.stats[label, s], metric) for s in self.snr_list]))
        return rows


def compare_estimators(cfg, snr_list):
    """Grid sweep of every configured estimator at each SNR."""
    if not cfg.estimators:
        raise ParameterError("at least one estimator is required")
    labels = [s.label for s in cfg.estimators]
    stats, grids = {}, {}
    for snr in snr_list:
        res = run_grid_sweep(cfg, snr)
        grids[snr] = res
        for label in labels:
            stats[label, snr] = res.stats[label]
    return ComparisonResult(list(snr_list), labels, stats, grids)
