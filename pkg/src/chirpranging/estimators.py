"""
Peak selection on a correlation series.

Four ways of choosing the lag that corresponds to the direct path:

- maximum: global maximum of the correlation magnitude.
- windowed: multiply by a decaying window first, then take the maximum.
- prominence: first peak whose prominence reaches a threshold (PPF).
- delta_peak: the peak following the largest rise between consecutive peaks.

All pickers treat index order as arrival order; `estimate_distance` feeds
them ``CorrelationSeries.arrival_order()`` so that "first" means "shortest
path". When the series carries an envelope, prominence and delta_peak find
peaks on the envelope (one per lobe instead of one per carrier cycle) and
then refine to the largest magnitude inside the chosen lobe.
"""

from dataclasses import dataclass
import enum

import numpy as np

from .errors import NegativeDistanceError, NoSignalError, ParameterError
from .ranging import lag_to_distance, pulse_compress

DEFAULT_PPF = 65.0
NORMALIZED_PEAK = 100.0


class WindowShape(enum.Enum):
    LINEAR = "linear"
    QUADRATIC_POS = "quadratic_pos"
    QUADRATIC_NEG = "quadratic_neg"
    EXPONENTIAL = "exponential"


class Method(enum.Enum):
    MAXIMUM = "maximum"
    WINDOWED = "windowed"
    PROMINENCE = "prominence"
    DELTA_PEAK = "delta_peak"


@dataclass(frozen=True)
class WindowSpec:
    shape: WindowShape = WindowShape.QUADRATIC_POS
    slope: float = -1.0
    half_life: float = 0.003

    def __post_init__(self):
        object.__setattr__(self, "shape", WindowShape(self.shape))
        if self.shape is WindowShape.LINEAR and abs(self.slope) > 1:
            raise ParameterError(f"linear window slope magnitude must be <= 1, got {self.slope}")
        if self.shape is WindowShape.EXPONENTIAL and not self.half_life > 0:
            raise ParameterError(f"half_life must be > 0, got {self.half_life}")

    @property
    def label(self):
        if self.shape is WindowShape.LINEAR:
            return f"linear{self.slope:g}"
        if self.shape is WindowShape.EXPONENTIAL:
            return f"exp{self.half_life * 1e3:g}ms"
        return self.shape.value


@dataclass(frozen=True)
class EstimatorSpec:
    method: Method = Method.MAXIMUM
    window: WindowSpec = None
    ppf: float = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if self.method is Method.WINDOWED and self.window is None:
            raise ParameterError("windowed estimator requires a WindowSpec")
        if self.method is Method.PROMINENCE:
            if self.ppf is None:
                object.__setattr__(self, "ppf", DEFAULT_PPF)
            if not self.ppf > 0:
                raise ParameterError(f"ppf must be > 0, got {self.ppf}")

    @property
    def label(self):
        if self.method is Method.WINDOWED:
            return f"window_{self.window.label}"
        if self.method is Method.PROMINENCE:
            return f"prominence_{self.ppf:g}"
        return self.method.value

    @property
    def uses_envelope(self):
        return self.method is not Method.MAXIMUM


MAXIMUM = EstimatorSpec(Method.MAXIMUM)
QUADRATIC_WINDOW = EstimatorSpec(Method.WINDOWED, WindowSpec(WindowShape.QUADRATIC_POS))
PROMINENCE = EstimatorSpec(Method.PROMINENCE, ppf=DEFAULT_PPF)
DELTA_PEAK = EstimatorSpec(Method.DELTA_PEAK)
DEFAULT_ESTIMATORS = (MAXIMUM, QUADRATIC_WINDOW, PROMINENCE, DELTA_PEAK)


@dataclass(frozen=True, eq=False)
class PeakSet:
    indices: np.ndarray
    heights: np.ndarray
    prominences: np.ndarray = None

    def __len__(self):
        return len(self.indices)


def _as_values(corr):
    return np.asarray(getattr(corr, "values", corr), dtype=float)


def find_local_maxima(corr):
    """Strict interior local maxima; a flat top is reported at its first index.

    A plateau counts only when the values on both of its sides are lower.
    """
    v = _as_values(corr)
    if len(v) < 3:
        return PeakSet(np.array([], dtype=int), np.array([]))
    starts = np.flatnonzero(np.r_[True, np.diff(v) != 0])
    runs = v[starts]
    if len(runs) < 3:
        return PeakSet(np.array([], dtype=int), np.array([]))
    inner = (runs[1:-1] > runs[:-2]) & (runs[1:-1] > runs[2:])
    idx = starts[1:-1][inner]
    return PeakSet(idx, v[idx])


def _previous_greater(v):
    # Index of the nearest strictly greater value to the left, -1 if none.
    out = np.full(len(v), -1, dtype=np.int64)
    stack = []
    for i, x in enumerate(v.tolist()):
        while stack and v[stack[-1]] <= x:
            stack.pop()
        if stack:
            out[i] = stack[-1]
        stack.append(i)
    return out


def peak_prominences(corr, peaks=None):
    """Prominence of every peak in `peaks` (default: all local maxima).

    From each peak a level line runs left and right until it meets a higher
    value or the end of the series. The prominence is the peak height minus
    the larger of the two minima found along those runs.
    """
    v = _as_values(corr)
    if peaks is None:
        peaks = find_local_maxima(v)
    idx = np.asarray(peaks.indices, dtype=np.int64)
    if len(idx) == 0:
        return PeakSet(idx, np.array([]), np.array([]))
    left_higher = _previous_greater(v)
    right_higher = _previous_greater(v[::-1])[::-1]
    right_higher = np.where(right_higher >= 0, len(v) - 1 - right_higher, len(v))
    prom = np.empty(len(idx))
    for k, i in enumerate(idx):
        left_min = v[left_higher[i] + 1:i + 1].min()
        right_min = v[i:right_higher[i]].min()
        prom[k] = v[i] - max(left_min, right_min)
    return PeakSet(idx, v[idx], prom)


def window_weights(n, window, sample_rate):
    """Window values over `n` entries (position i/(n-1), or time i/fs)."""
    i = np.arange(n, dtype=float)
    x = i / (n - 1) if n > 1 else np.zeros(n)
    shape = window.shape
    if shape is WindowShape.LINEAR:
        return 1.0 + window.slope * x
    if shape is WindowShape.QUADRATIC_POS:
        return (1.0 - x) ** 2
    if shape is WindowShape.QUADRATIC_NEG:
        return 1.0 - x ** 2
    return 2.0 ** (-(i / sample_rate) / window.half_life)


def apply_window(corr, window):
    w = window_weights(len(corr), window, corr.sample_rate)
    env = None if corr.envelope is None else corr.envelope * w
    return type(corr)(corr.values * w, corr.lags, corr.sample_rate, env)


def _index_of_max(v):
    return int(np.argmax(v))


def pick_maximum(corr):
    """Lag of the global maximum (earliest on ties)."""
    return int(corr.lags[_index_of_max(corr.values)])


def _lobe_argmax(values, envelope, i):
    # climb to the top of the envelope lobe holding i, then widen to the
    # minima on either side and take the largest carrier sample within
    n = len(envelope)
    while True:
        if i + 1 < n and envelope[i + 1] > envelope[i]:
            i += 1
        elif i > 0 and envelope[i - 1] > envelope[i]:
            i -= 1
        else:
            break
    lo = i
    while lo > 0 and envelope[lo - 1] <= envelope[lo]:
        lo -= 1
    hi = i
    while hi < len(envelope) - 1 and envelope[hi + 1] <= envelope[hi]:
        hi += 1
    return lo + _index_of_max(values[lo:hi + 1])


def _peak_base(corr):
    return corr.values if corr.envelope is None else corr.envelope


def _resolve(corr, i):
    if corr.envelope is not None:
        i = _lobe_argmax(corr.values, corr.envelope, i)
    return int(corr.lags[i])


def pick_prominence(corr, ppf=DEFAULT_PPF):
    """Lag of the first peak whose prominence is at least `ppf`.

    Prominences are measured after scaling the series so that its maximum
    is 100. The global maximum counts as qualifying, so the result is never
    later than `pick_maximum`, which is also the fallback.
    """
    if not ppf > 0:
        raise ParameterError(f"ppf must be > 0, got {ppf}")
    base = _peak_base(corr)
    top = base.max()
    if not top > 0:
        return pick_maximum(corr)
    peaks = peak_prominences(base)
    hits = np.flatnonzero(peaks.prominences >= ppf * top / NORMALIZED_PEAK)
    # The global maximum always qualifies, even when it sits on an endpoint
    # and is therefore not a local maximum.
    first = _index_of_max(base)
    if len(hits) and peaks.indices[hits[0]] < first:
        first = int(peaks.indices[hits[0]])
    if first == _index_of_max(base):
        return pick_maximum(corr)
    return _resolve(corr, first)


def pick_delta(corr):
    """Lag of the peak that follows the largest rise between consecutive peaks.

    The rise into the first peak is measured from zero, so a series whose
    peaks only decrease yields its first peak. Without any peak, the maximum.
    """
    peaks = find_local_maxima(_peak_base(corr))
    if len(peaks) == 0:
        return pick_maximum(corr)
    # the first peak rises from the zero baseline of the magnitude series
    rises = np.diff(peaks.heights, prepend=0.0)
    return _resolve(corr, int(peaks.indices[int(np.argmax(rises))]))


def select_lag(corr, spec):
    """Dispatch to the picker configured by `spec`."""
    method = spec.method
    if method is Method.MAXIMUM:
        return pick_maximum(corr)
    if method is Method.WINDOWED:
        windowed = apply_window(corr, spec.window)
        if corr.envelope is None:
            return pick_maximum(windowed)
        # weight lobes, not carrier cycles: pick the lobe on the windowed
        # envelope, then the unweighted carrier maximum inside it
        return _resolve(corr, _index_of_max(windowed.envelope))
    if method is Method.PROMINENCE:
        return pick_prominence(corr, spec.ppf)
    return pick_delta(corr)


def signed_distance(lag, timing):
    """Distance for `lag`; negative when the lag lies beyond the wake offset."""
    try:
        return lag_to_distance(lag, timing)
    except NegativeDistanceError:
        return timing.speed_of_sound * (timing.wake_offset - lag / timing.sample_rate)


def compress_for(snippet, template, specs):
    """Arrival-ordered correlation with an envelope when any spec needs one."""
    if not np.any(snippet.samples):
        raise NoSignalError("snippet is all zeros")
    need_env = any(s.uses_envelope for s in specs)
    return pulse_compress(snippet, template, envelope=need_env).arrival_order()


def estimate_distances(snippet, template, timing, specs):
    """Distance estimate for each spec, sharing one correlation."""
    corr = compress_for(snippet, template, specs)
    return [signed_distance(select_lag(corr, s), timing) for s in specs]


def estimate_distance(snippet, template, timing, spec=MAXIMUM):
    """Distance from a wake-up snippet with the configured peak picker.

    Raises
    ------
    NoSignalError
        The snippet is all zeros.

    A lag beyond the wake offset yields a negative distance rather than an
    exception, so experiment statistics can count it as an outlier.
    """
    return estimate_distances(snippet, template, timing, [spec])[0]
