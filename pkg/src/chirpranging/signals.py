"""
Transmitted chirp synthesis and the receive chain.

generate_chirp(): sampled real linear chirp.
instantaneous_frequency(): linear frequency ramp of a chirp.
add_white_noise(): additive Gaussian noise at a given SNR.
extract_window(): cut a (zero padded) time window out of a waveform.
quantize(): uniform mid-tread ADC model.
analytic_autocorrelation(): closed-form autocorrelation envelope of a chirp.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, ParameterError

#: Sample rate of the receiving node's ADC (Hz).
DEFAULT_SAMPLE_RATE = 196_000.0


@dataclass(frozen=True)
class ChirpSpec:
    """Linear chirp sweeping from `f_start` to `f_end` over `tau_tx` seconds.

    Descending sweeps (``f_start > f_end``) are allowed and are the default.
    """

    f_start: float = 45_000.0
    f_end: float = 25_000.0
    tau_tx: float = 0.030
    amplitude: float = 1.0
    sample_rate: float = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))

    def problems(self):
        out = []
        if not self.tau_tx > 0:
            out.append(f"tau_tx must be > 0, got {self.tau_tx}")
        if not self.amplitude > 0:
            out.append(f"amplitude must be > 0, got {self.amplitude}")
        if min(self.f_start, self.f_end) < 0:
            out.append("chirp frequencies must be non-negative")
        if not self.sample_rate > 2 * max(self.f_start, self.f_end):
            out.append(
                f"sample_rate {self.sample_rate} violates Nyquist for "
                f"{max(self.f_start, self.f_end)} Hz")
        if self.bandwidth <= 0:
            out.append("chirp bandwidth |f_end - f_start| must be > 0")
        return out

    @property
    def bandwidth(self):
        return abs(self.f_end - self.f_start)

    @property
    def rate(self):
        """Signed sweep rate in Hz/s."""
        return (self.f_end - self.f_start) / self.tau_tx

    @property
    def n_samples(self):
        return int(round(self.tau_tx * self.sample_rate))


@dataclass(frozen=True, eq=False)
class Waveform:
    """Uniformly sampled real signal; `t0` is the time of the first sample."""

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ParameterError("waveform samples must be one-dimensional")
        if not self.sample_rate > 0:
            raise ParameterError(f"sample_rate must be > 0, got {self.sample_rate}")
        if not np.all(np.isfinite(samples)):
            raise ParameterError("waveform samples must be finite")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self):
        return len(self.samples) / self.sample_rate

    @property
    def times(self):
        return self.t0 + np.arange(len(self.samples)) / self.sample_rate

    def power(self):
        """Mean squared sample value."""
        if len(self.samples) == 0:
            return 0.0
        return float(np.mean(self.samples ** 2))

    def with_samples(self, samples):
        return Waveform(samples, self.sample_rate, self.t0)


@dataclass(frozen=True)
class NoiseSpec:
    """White noise at `snr_db`; ``math.inf`` means no noise at all."""

    snr_db: float = math.inf
    seed: int = 0


def chirp_phase(spec, t):
    """Phase in cycles of the chirp at times `t`."""
    t = np.asarray(t, dtype=float)
    return spec.f_start * t + 0.5 * spec.rate * t * t


def generate_chirp(spec):
    """Sample the real part of a linear chirp.

    Parameters
    ----------
    spec : ChirpSpec

    Returns
    -------
    Waveform
        ``round(tau_tx * sample_rate)`` samples of
        ``A cos(2 pi (f_start t + rate t^2 / 2))`` starting at t = 0.
    """
    if not isinstance(spec, ChirpSpec):
        raise ParameterError("generate_chirp expects a ChirpSpec")
    t = np.arange(spec.n_samples) / spec.sample_rate
    samples = spec.amplitude * np.cos(2 * np.pi * chirp_phase(spec, t))
    return Waveform(samples, spec.sample_rate, 0.0)


def instantaneous_frequency(spec, t):
    """Frequency of the chirp at time `t` in [0, tau_tx]."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > spec.tau_tx):
        raise DomainError(f"t must lie in [0, {spec.tau_tx}]")
    f = spec.f_start + spec.rate * t_arr
    return float(f) if f.ndim == 0 else f


def noise_sigma(signal_power, snr_db):
    """Standard deviation of white noise giving `snr_db` against `signal_power`."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    if not signal_power > 0:
        raise DomainError("signal has zero power; a finite SNR is undefined")
    return math.sqrt(signal_power / 10 ** (snr_db / 10))


def add_white_noise(w, noise):
    """Add zero-mean Gaussian noise referenced to the power of `w`.

    The noise sequence depends only on ``noise.seed`` and ``len(w)``, so two
    signals of equal length receive identical noise for the same seed.
    """
    if len(w) == 0:
        raise ParameterError("cannot add noise to an empty waveform")
    sigma = noise_sigma(w.power(), noise.snr_db)
    if sigma == 0.0:
        return w
    rng = np.random.default_rng(noise.seed)
    return w.with_samples(w.samples + sigma * rng.standard_normal(len(w)))


def extract_window(w, start, duration):
    """Samples of `w` on ``[start, start + duration)``, zero padded outside `w`."""
    if not duration > 0:
        raise ParameterError(f"duration must be > 0, got {duration}")
    fs = w.sample_rate
    first = int(round((start - w.t0) * fs))
    n = int(round(duration * fs))
    out = np.zeros(n)
    lo = max(first, 0)
    hi = min(first + n, len(w))
    if hi > lo:
        out[lo - first:hi - first] = w.samples[lo:hi]
    return Waveform(out, fs, start)


def quantize(w, bits=12, full_scale=1.0):
    """Clamp to ``[-full_scale, full_scale]`` and round to 2**bits levels.

    Levels are ``k * step`` for integer k in ``[-2**(bits-1), 2**(bits-1) - 1]``
    with ``step = 2 * full_scale / 2**bits`` (mid-tread converter).
    """
    if not (isinstance(bits, (int, np.integer)) and 2 <= bits <= 24):
        raise ParameterError(f"bits must be an integer in [2, 24], got {bits}")
    if not full_scale > 0:
        raise ParameterError(f"full_scale must be > 0, got {full_scale}")
    step = 2.0 * full_scale / 2 ** bits
    half = 2 ** (bits - 1)
    codes = np.clip(np.rint(w.samples / step), -half, half - 1)
    return w.with_samples(codes * step)


def triangle(x):
    """Unit triangle: 1 at 0, falling linearly to 0 at |x| = 1."""
    return np.clip(1.0 - np.abs(np.asarray(x, dtype=float)), 0.0, None)


def window_bandwidth(spec, window):
    """Frequency span swept by the chirp during `window` seconds."""
    return spec.bandwidth * window / spec.tau_tx


def analytic_autocorrelation(spec, t, window):
    """Closed-form magnitude of the chirp autocorrelation at lag `t`.

    ``|A^2 tau Lambda(t/tau) sinc(df t Lambda(t/tau))|`` with ``tau = window``
    and ``df`` the bandwidth swept within the window.
    """
    if not window > 0:
        raise ParameterError(f"window must be > 0, got {window}")
    t = np.asarray(t, dtype=float)
    lam = triangle(t / window)
    df = window_bandwidth(spec, window)
    val = np.abs(spec.amplitude ** 2 * window * lam * np.sinc(df * t * lam))
    return float(val) if val.ndim == 0 else val
