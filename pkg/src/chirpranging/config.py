"""
INI configuration with one flat section per module.

Every key has a default that reproduces the flagship setup, so an empty file
(or no file) is a valid configuration. Values may be overridden with
``section.key=value`` strings. Validation reports every problem at once.

    [room]        dims, absorption, speed_of_sound
    [source]      position            (x, y, z or "auto": center + (0.1, 0.1), z = 1)
    [chirp]       f_start, f_end, tau_tx, amplitude, sample_rate
    [timing]      tau_rx, wake_offset (seconds or "auto" = tau_tx - tau_rx)
    [noise]       snr_db (comma list; "inf" = noiseless), seed
    [receivers]   nx, ny, spacing, margin, z ("auto" = from scale),
                  position (single receiver for rir/mc, "auto"), mc_distance
    [estimators]  methods, ppf, slope, half_life, ppf_values
    [experiment]  scale (desk|paper), trials ("auto": Monte Carlo trials for the
                  scale), grid_trials (noise draws per grid receiver), workers,
                  bits ("none" disables quantization), max_order ("auto")
    [power]       supply_voltage, active_time, period, capacity_mah, shelf_life_years
"""

import configparser
from dataclasses import dataclass
import math

from .errors import ConfigError, ParameterError
from .estimators import EstimatorSpec, Method, WindowShape, WindowSpec
from .experiments import (DESK_GRID, DESK_TRIALS, FULL_GRID, FULL_TRIALS,
                          ExperimentConfig, GridSpec, flagship_receiver)
from .ranging import TimingSpec
from .room import RoomSpec
from .signals import ChirpSpec

DEFAULTS = {
    "room": {"dims": "6.0, 4.0, 2.5", "absorption": "0.3", "speed_of_sound": "340"},
    "source": {"position": "auto"},
    "chirp": {"f_start": "45000", "f_end": "25000", "tau_tx": "0.030",
              "amplitude": "1.0", "sample_rate": "196000"},
    "timing": {"tau_rx": "0.001", "wake_offset": "auto"},
    "noise": {"snr_db": "inf", "seed": "0"},
    "receivers": {"nx": "auto", "ny": "auto", "spacing": "auto", "margin": "auto",
                  "z": "auto", "position": "auto", "mc_distance": "1.553"},
    "estimators": {"methods": "maximum, window_quadratic_pos, prominence, delta_peak",
                   "ppf": "65", "slope": "-1", "half_life": "0.003",
                   "ppf_values": "5, 15, 25, 35, 45, 55, 65, 75, 85, 95"},
    "experiment": {"scale": "desk", "trials": "auto", "grid_trials": "1", "workers": "1", "bits": "12",
                   "max_order": "auto"},
    "power": {"supply_voltage": "3.6", "active_time": "0.001", "period": "1.0",
              "capacity_mah": "225", "shelf_life_years": "8.5"},
}

SCALES = ("desk", "paper")
METHOD_NAMES = ("maximum", "window_linear", "window_quadratic_pos", "window_quadratic_neg",
                "window_exponential", "prominence", "delta_peak")


def estimator_from_name(name, ppf=65.0, slope=-1.0, half_life=0.003):
    name = name.strip().lower()
    if name.startswith("window_"):
        shape = WindowShape(name[len("window_"):])
        return EstimatorSpec(Method.WINDOWED, WindowSpec(shape, slope, half_life))
    if name in ("linear", "quadratic_pos", "quadratic_neg", "exponential"):
        return estimator_from_name("window_" + name, ppf, slope, half_life)
    method = Method(name)
    if method is Method.WINDOWED:
        raise ValueError("use window_<shape> to name a windowed estimator")
    return EstimatorSpec(method, ppf=ppf if method is Method.PROMINENCE else None)


@dataclass
class Settings:
    """Validated configuration, ready to build experiment objects."""

    room: RoomSpec
    chirp: ChirpSpec
    timing: TimingSpec
    source: tuple
    snr_list: list
    seed: int
    grid: GridSpec
    receiver: tuple
    mc_distance: float
    estimators: tuple
    ppf_values: list
    scale: str
    trials: int
    grid_trials: int
    workers: int
    bits: int
    max_order: int
    power: dict

    def experiment(self, receivers=None, snr_db=None, trials=1, estimators=None):
        return ExperimentConfig(
            room=self.room, chirp=self.chirp, timing=self.timing, source=self.source,
            receivers=self.grid if receivers is None else receivers,
            snr_db=self.snr_list[0] if snr_db is None else snr_db,
            estimators=self.estimators if estimators is None else estimators,
            trials=trials, master_seed=self.seed, bits=self.bits,
            max_order=self.max_order, workers=self.workers)

    def mc_receiver(self):
        if self.receiver is not None:
            return self.receiver
        return flagship_receiver(self.source, self.mc_distance)


def read_config(path=None, overrides=()):
    """Parse `path` (optional) and ``section.key=value`` overrides."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.read_dict(DEFAULTS)
    problems = []
    if path is not None:
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError([f"cannot read config {path}: {exc}"]) from None
    for item in overrides:
        key, sep, value = item.partition("=")
        section, dot, option = key.strip().partition(".")
        if not sep or not dot:
            problems.append(f"override {item!r} is not section.key=value")
            continue
        if section not in DEFAULTS or option not in DEFAULTS[section]:
            problems.append(f"unknown setting {key.strip()!r}")
            continue
        parser.set(section, option, value.strip())
    for section in parser.sections():
        if section not in DEFAULTS:
            problems.append(f"unknown section [{section}]")
            continue
        for option in parser.options(section):
            if option not in DEFAULTS[section]:
                problems.append(f"unknown setting {section}.{option}")
    return _validate(parser, problems)


class _Reader:
    def __init__(self, parser, problems):
        self.parser = parser
        self.problems = problems

    def raw(self, section, key):
        return self.parser.get(section, key).strip()

    def _convert(self, section, key, conv, default):
        text = self.raw(section, key)
        try:
            return conv(text)
        except (ValueError, TypeError):
            self.problems.append(f"{section}.{key}: cannot parse {text!r}")
            return default

    def float(self, section, key, default=math.nan):
        return self._convert(section, key, float, default)

    def int(self, section, key, default=0):
        return self._convert(section, key, int, default)

    def auto(self, section, key, conv, default=None):
        if self.raw(section, key).lower() == "auto":
            return default
        return self._convert(section, key, conv, default)

    def floats(self, section, key, default=()):
        return self._convert(section, key, lambda t: [float(v) for v in t.split(",") if v.strip()],
                             list(default))


def _point(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 3:
        raise ValueError
    return tuple(vals)


def _build(problems, label, factory, *args, **kw):
    try:
        return factory(*args, **kw)
    except (ParameterError, ValueError) as exc:
        problems.append(f"{label}: {exc}")
        return None


def _validate(parser, problems):
    r = _Reader(parser, problems)

    dims = r.floats("room", "dims", (6.0, 4.0, 2.5))
    room = _build(problems, "room", RoomSpec, tuple(dims), r.float("room", "absorption"),
                  r.float("room", "speed_of_sound"))
    chirp = _build(problems, "chirp", ChirpSpec, r.float("chirp", "f_start"),
                   r.float("chirp", "f_end"), r.float("chirp", "tau_tx"),
                   r.float("chirp", "amplitude"), r.float("chirp", "sample_rate"))
    tau_rx = r.float("timing", "tau_rx")
    tau_tx = chirp.tau_tx if chirp else math.nan
    wake = r.auto("timing", "wake_offset", float, tau_tx - tau_rx)
    timing = _build(problems, "timing", TimingSpec, tau_tx, tau_rx, wake,
                    room.speed_of_sound if room else 340.0,
                    chirp.sample_rate if chirp else 196000.0)

    source = r.auto("source", "position", _point)
    if source is None and room is not None:
        source = room.default_source()
    if room is not None and source is not None and not room.contains(source):
        problems.append(f"source.position {source} is not inside the room")

    snr_list = r.floats("noise", "snr_db", [math.inf])
    if not snr_list:
        problems.append("noise.snr_db must list at least one value")
    seed = r.int("noise", "seed")
    if not 0 <= seed < 2 ** 64:
        problems.append("noise.seed must be a 64-bit unsigned integer")

    scale = r.raw("experiment", "scale").lower()
    if scale not in SCALES:
        problems.append(f"experiment.scale must be one of {SCALES}, got {scale!r}")
        scale = "desk"
    base_grid = FULL_GRID if scale == "paper" else DESK_GRID
    grid = GridSpec(r.auto("receivers", "nx", int, base_grid.nx),
                    r.auto("receivers", "ny", int, base_grid.ny),
                    r.auto("receivers", "spacing", float, base_grid.spacing),
                    r.auto("receivers", "margin", float, base_grid.margin),
                    r.auto("receivers", "z", float, base_grid.z))
    if grid.nx < 1 or grid.ny < 1:
        problems.append("receivers.nx and receivers.ny must be >= 1")
    elif room is not None:
        outside = [p for p in grid.points() if not room.contains(p)]
        if outside:
            problems.append(f"receiver grid leaves the room at {outside[-1]}")
    receiver = r.auto("receivers", "position", _point)
    if receiver is not None and room is not None and not room.contains(receiver):
        problems.append(f"receivers.position {receiver} is not inside the room")
    mc_distance = r.float("receivers", "mc_distance")
    if receiver is None and room is not None and source is not None and mc_distance > 0:
        if not room.contains(flagship_receiver(source, mc_distance)):
            problems.append("receivers.mc_distance puts the receiver outside the room")

    ppf = r.float("estimators", "ppf")
    slope = r.float("estimators", "slope")
    half_life = r.float("estimators", "half_life")
    estimators = []
    names = [n.strip() for n in r.raw("estimators", "methods").split(",") if n.strip()]
    if not names:
        problems.append("estimators.methods must name at least one estimator")
    for name in names:
        spec = _build(problems, f"estimator {name!r}", estimator_from_name, name, ppf, slope,
                      half_life)
        if spec is not None:
            estimators.append(spec)
    ppf_values = r.floats("estimators", "ppf_values")
    if any(not p > 0 for p in ppf_values):
        problems.append("estimators.ppf_values must all be > 0")

    trials = r.auto("experiment", "trials", int, FULL_TRIALS if scale == "paper" else DESK_TRIALS)
    if trials < 1:
        problems.append("experiment.trials must be >= 1")
    grid_trials = r.int("experiment", "grid_trials", 1)
    if grid_trials < 1:
        problems.append("experiment.grid_trials must be >= 1")
    workers = r.int("experiment", "workers", 1)
    if workers < 1:
        problems.append("experiment.workers must be >= 1")
    bits_text = r.raw("experiment", "bits").lower()
    bits = None if bits_text in ("none", "off") else r.int("experiment", "bits", 12)
    if bits is not None and not 2 <= bits <= 24:
        problems.append("experiment.bits must lie in [2, 24] (or 'none')")
    max_order = r.auto("experiment", "max_order", int)
    if max_order is not None and max_order < 0:
        problems.append("experiment.max_order must be >= 0")

    power = {k: r.float("power", k) for k in DEFAULTS["power"]}
    for k, v in power.items():
        if not v > 0:
            problems.append(f"power.{k} must be > 0")
    if power["active_time"] > power["period"]:
        problems.append("power.active_time must not exceed power.period")

    if problems:
        raise ConfigError(problems)
    return Settings(room, chirp, timing, source, snr_list, seed, grid, receiver, mc_distance,
                    tuple(estimators), ppf_values, scale, trials, grid_trials, workers, bits, max_order, power)
