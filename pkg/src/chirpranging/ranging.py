"""
Pulse compression of a wake-up snippet and the lag/distance geometry.

A node at distance d woken at ``wake_offset`` after the broadcast start hears
the template segment that began ``wake_offset - d/c`` seconds into the
broadcast, so the correlation lag (template offset in samples) maps to
``d = c * (wake_offset - lag / fs)``.
"""

from dataclasses import dataclass, replace
import enum

import numpy as np
import scipy.signal

from .errors import NegativeDistanceError, ParameterError, RateMismatchError


@dataclass(frozen=True, eq=False)
class CorrelationSeries:
    """Magnitude of the snippet/template cross-correlation.

    Attributes
    ----------
    values : ndarray
        ``|sum_n snippet[n] * template[lag + n]|`` per entry.
    lags : ndarray of int
        Template offset (samples) of each entry. Ascending for the raw
        output of `pulse_compress`, descending after `arrival_order`.
    sample_rate : float
    envelope : ndarray, optional
        Magnitude of the correlation against the analytic template; smooth
        over carrier cycles. Used by the lobe-level peak pickers.
    """

    values: np.ndarray
    lags: np.ndarray
    sample_rate: float
    envelope: np.ndarray = None

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_values(cls, values, sample_rate=1.0, envelope=None):
        values = np.asarray(values, dtype=float)
        if envelope is not None:
            envelope = np.asarray(envelope, dtype=float)
        return cls(values, np.arange(len(values)), sample_rate, envelope)

    def arrival_order(self):
        """Reverse into increasing propagation delay (decreasing lag).

        Echoes travel further and therefore match earlier template segments;
        in this order the direct path comes before its reflections.
        """
        env = None if self.envelope is None else self.envelope[::-1].copy()
        return CorrelationSeries(self.values[::-1].copy(), self.lags[::-1].copy(),
                                 self.sample_rate, env)

    def scaled(self, factor):
        env = None if self.envelope is None else self.envelope * factor
        return replace(self, values=self.values * factor, envelope=env)


class Scenario(enum.Enum):
    LATE_WAKE = "late_wake"
    EARLY_WAKE = "early_wake"
    POST_BROADCAST_WAKE = "post_broadcast_wake"


@dataclass(frozen=True)
class TimingSpec:
    tau_tx: float = 0.030
    tau_rx: float = 0.001
    wake_offset: float = 0.029
    speed_of_sound: float = 340.0
    sample_rate: float = 196_000.0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))

    def problems(self):
        out = []
        if not 0 < self.tau_rx <= self.tau_tx:
            out.append(f"need 0 < tau_rx <= tau_tx, got {self.tau_rx}, {self.tau_tx}")
        if self.wake_offset < 0:
            out.append(f"wake_offset must be >= 0, got {self.wake_offset}")
        if not self.speed_of_sound > 0:
            out.append("speed_of_sound must be > 0")
        if not self.sample_rate > 0:
            out.append("sample_rate must be > 0")
        return out

    @classmethod
    def late_wake(cls, tau_tx=0.030, tau_rx=0.001, **kw):
        return cls(tau_tx, tau_rx, tau_tx - tau_rx, **kw)


def _correlate_valid(snippet, template, method):
    if method == "direct":
        return np.correlate(template, snippet, mode="valid")
    if method == "fft":
        return scipy.signal.correlate(template, snippet, mode="valid", method="fft")
    raise ParameterError(f"unknown correlation method {method!r}")


def pulse_compress(snippet, template, method="direct", envelope=False):
    """Valid-overlap correlation magnitude of `snippet` against `template`.

    Parameters
    ----------
    snippet, template : Waveform
    method : {"direct", "fft"}
        Both agree to ~1e-12 relative; direct is exactly reproducible.
    envelope : bool
        Also compute the carrier-free envelope against the analytic template.

    Returns
    -------
    CorrelationSeries
        ``len(template) - len(snippet) + 1`` entries, entry i at lag i.
    """
    if snippet.sample_rate != template.sample_rate:
        raise RateMismatchError(
            f"snippet rate {snippet.sample_rate} != template rate {template.sample_rate}")
    if len(snippet) == 0:
        raise ParameterError("snippet is empty")
    if len(snippet) > len(template):
        raise ParameterError(
            f"snippet ({len(snippet)} samples) longer than template ({len(template)})")
    raw = _correlate_valid(snippet.samples, template.samples, method)
    env = None
    if envelope:
        analytic = scipy.signal.hilbert(template.samples)
        env = np.abs(_correlate_valid(snippet.samples.astype(complex), analytic, method))
    return CorrelationSeries(np.abs(raw), np.arange(len(raw)), template.sample_rate, env)


def lag_to_distance(lag, timing):
    """Distance of a node whose snippet matched the template at `lag` samples."""
    if lag < 0:
        raise ParameterError(f"lag must be >= 0, got {lag}")
    d = timing.speed_of_sound * (timing.wake_offset - lag / timing.sample_rate)
    if d < 0:
        raise NegativeDistanceError(
            f"lag {lag} lies {-d:.4f} m beyond the wake offset (spurious late peak)")
    return d


def distance_to_lag(distance, timing):
    """Fractional template offset heard at wake-up by a node at `distance`."""
    return (timing.wake_offset - distance / timing.speed_of_sound) * timing.sample_rate


def scenario_of(timing):
    gap = timing.tau_tx - timing.tau_rx
    if np.isclose(timing.wake_offset, gap, rtol=0, atol=1e-12):
        return Scenario.LATE_WAKE
    return Scenario.EARLY_WAKE if timing.wake_offset < gap else Scenario.POST_BROADCAST_WAKE


def coverage(timing, scenario=None):
    """Range of distances whose direct path is heard during the wake window.

    With ``scenario`` omitted it is inferred from the wake offset. For
    LATE_WAKE the wake offset is taken as ``tau_tx - tau_rx``.
    """
    if scenario is None:
        scenario = scenario_of(timing)
    scenario = Scenario(scenario)
    c = timing.speed_of_sound
    gap = timing.tau_tx - timing.tau_rx
    if scenario is Scenario.LATE_WAKE:
        return 0.0, c * gap
    if scenario is Scenario.EARLY_WAKE:
        return 0.0, c * timing.wake_offset
    return c * (timing.wake_offset - gap), c * timing.wake_offset


def broadcast_span(tau_tx, speed_of_sound=340.0):
    """Distance sound travels during the whole broadcast."""
    return tau_tx * speed_of_sound


def compression_ratio(tau_rx, tau_tx, delta_f_tx):
    """Received duration over compressed width: ``tau_rx**2 * delta_f_tx / tau_tx``."""
    if min(tau_rx, tau_tx, delta_f_tx) <= 0:
        raise ParameterError("compression_ratio inputs must be positive")
    return tau_rx ** 2 * delta_f_tx / tau_tx


def received_bandwidth(tau_rx, tau_tx, delta_f_tx):
    """Frequency span swept during the wake window."""
    return delta_f_tx * tau_rx / tau_tx
