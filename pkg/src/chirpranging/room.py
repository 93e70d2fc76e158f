"""
Shoebox room impulse responses with the Allen-Berkley image-source model.

Walls share one energy absorption coefficient; the pressure reflection
coefficient is ``sqrt(1 - alpha)``. Images land on the nearest sample.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.signal

from .errors import GeometryError, ParameterError, RateMismatchError
from .signals import (NoiseSpec, Waveform, add_white_noise, extract_window,
                      generate_chirp, quantize)

MAX_ORDER_CAP = 12
TAIL_RATIO = 1e-3


@dataclass(frozen=True)
class RoomSpec:
    dims: tuple = (6.0, 4.0, 2.5)
    absorption: float = 0.3
    speed_of_sound: float = 340.0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(float(d) for d in self.dims))
        problems = self.problems()
        if problems:
            raise ParameterError("; ".join(problems))

    def problems(self):
        out = []
        if len(self.dims) != 3 or not all(d > 0 for d in self.dims):
            out.append(f"room dims must be three positive lengths, got {self.dims}")
        if not 0.0 <= self.absorption <= 1.0:
            out.append(f"absorption must lie in [0, 1], got {self.absorption}")
        if not self.speed_of_sound > 0:
            out.append(f"speed_of_sound must be > 0, got {self.speed_of_sound}")
        return out

    @property
    def reflection(self):
        return math.sqrt(1.0 - self.absorption)

    def contains(self, point):
        p = np.asarray(point, dtype=float)
        return p.shape == (3,) and bool(np.all(p > 0) and np.all(p < self.dims))

    def default_source(self):
        """Slightly off-center source at 1 m height (avoids sweeping echoes)."""
        return (self.dims[0] / 2 + 0.1, self.dims[1] / 2 + 0.1, 1.0)


@dataclass(frozen=True, eq=False)
class ImpulseResponse:
    taps: Waveform
    source: tuple
    receiver: tuple
    max_order: int


def _check_inside(room, point, name):
    if not room.contains(point):
        raise GeometryError(f"{name} {tuple(point)} is not strictly inside room {room.dims}")


def _axis_images(src, length, max_order):
    # Image coordinates along one axis and their reflection counts.
    pos = [src]
    refl = [0]
    for r in range(1, max_order + 1):
        if r % 2 == 0:
            n = r // 2
            pos += [2 * n * length + src, -2 * n * length + src]
        else:
            n = (r + 1) // 2
            pos += [2 * n * length - src, -2 * (n - 1) * length - src]
        refl += [r, r]
    return np.array(pos), np.array(refl)


def image_sources(room, source, max_order):
    """All image positions with total reflection order <= `max_order`.

    Returns
    -------
    positions : ndarray, shape (n, 3)
    orders : ndarray of int, shape (n,)
    """
    if max_order < 0:
        raise ParameterError(f"max_order must be >= 0, got {max_order}")
    axes = [_axis_images(source[a], room.dims[a], max_order) for a in range(3)]
    px, py, pz = np.meshgrid(axes[0][0], axes[1][0], axes[2][0], indexing="ij")
    ox, oy, oz = np.meshgrid(axes[0][1], axes[1][1], axes[2][1], indexing="ij")
    orders = (ox + oy + oz).ravel()
    keep = orders <= max_order
    positions = np.stack([px.ravel(), py.ravel(), pz.ravel()], axis=1)[keep]
    return positions, orders[keep]


def default_max_order(room, source, receiver):
    """Smallest order whose strongest image is 60 dB below the direct path.

    Capped at MAX_ORDER_CAP.
    """
    beta = room.reflection
    direct = np.linalg.norm(np.subtract(source, receiver))
    positions, orders = image_sources(room, source, MAX_ORDER_CAP)
    dist = np.linalg.norm(positions - np.asarray(receiver, dtype=float), axis=1)
    for n in range(1, MAX_ORDER_CAP + 1):
        d_min = dist[orders == n].min()
        if beta ** n * direct / d_min < TAIL_RATIO:
            return n
    return MAX_ORDER_CAP


def compute_rir(room, source, receiver, sample_rate, max_order=None, length=None):
    """Image-source impulse response from `source` to `receiver`.

    Parameters
    ----------
    room : RoomSpec
    source, receiver : sequence of 3 floats
        Positions in meters, strictly inside the room.
    sample_rate : float
    max_order : int, optional
        Highest total reflection order; defaults to `default_max_order`.
    length : float, optional
        Duration of the response in seconds. Images arriving later are
        dropped. Defaults to the latest image arrival.

    Returns
    -------
    ImpulseResponse
    """
    source = tuple(float(v) for v in source)
    receiver = tuple(float(v) for v in receiver)
    _check_inside(room, source, "source")
    _check_inside(room, receiver, "receiver")
    if max_order is None:
        max_order = default_max_order(room, source, receiver)
    if max_order < 0:
        raise ParameterError(f"max_order must be >= 0, got {max_order}")

    c = room.speed_of_sound
    direct = math.dist(source, receiver)
    if direct == 0.0:
        raise GeometryError("source and receiver coincide; the direct path is singular")
    direct_idx = int(round(sample_rate * direct / c))
    if length is not None and length < direct / c:
        raise ParameterError(
            f"length {length} s is shorter than the direct-path delay {direct / c} s")

    beta = room.reflection
    positions, orders = image_sources(room, source, max_order)
    if beta == 0.0:
        mask = orders == 0
        positions, orders = positions[mask], orders[mask]
    dist = np.linalg.norm(positions - np.asarray(receiver), axis=1)
    idx = np.rint(dist * sample_rate / c).astype(np.int64)
    if length is None:
        n_taps = int(idx.max()) + 1
    else:
        n_taps = max(int(round(length * sample_rate)), direct_idx + 1)
    keep = idx < n_taps
    taps = np.zeros(n_taps)
    amp = beta ** orders[keep] / (4 * np.pi * dist[keep])
    np.add.at(taps, idx[keep], amp)
    return ImpulseResponse(Waveform(taps, sample_rate, 0.0), source, receiver, max_order)


def convolve(signal, rir):
    """Full linear convolution of `signal` with the impulse response taps."""
    taps = rir.taps if isinstance(rir, ImpulseResponse) else rir
    if signal.sample_rate != taps.sample_rate:
        raise RateMismatchError(
            f"signal rate {signal.sample_rate} != rir rate {taps.sample_rate}")
    out = scipy.signal.convolve(signal.samples, taps.samples, mode="full")
    return Waveform(out, signal.sample_rate, signal.t0)


def clean_reception(spec, room, source, receiver, t_wake, tau_rx, max_order=None):
    """Noise-free pressure trace at `receiver`; the broadcast starts at t = 0."""
    if t_wake < 0:
        raise ParameterError(f"t_wake must be >= 0, got {t_wake}")
    if not tau_rx > 0:
        raise ParameterError(f"tau_rx must be > 0, got {tau_rx}")
    chirp = generate_chirp(spec)
    direct = math.dist(source, receiver) / room.speed_of_sound
    length = max(t_wake + tau_rx, direct)
    rir = compute_rir(room, source, receiver, spec.sample_rate, max_order, length)
    return convolve(chirp, rir)


def receive(trace, noise, t_wake, tau_rx, bits=12, full_scale=None):
    """Wake-up snippet of a clean trace: window, add noise, quantize.

    The SNR is referenced to the clean snippet. `full_scale` defaults to the
    peak magnitude of the clean trace; ``bits=None`` skips quantization.
    """
    snippet = extract_window(trace, t_wake, tau_rx)
    noisy = add_white_noise(snippet, noise)
    if bits is None:
        return noisy
    if full_scale is None:
        full_scale = float(np.max(np.abs(trace.samples))) if len(trace) else 0.0
    if full_scale == 0.0:
        return noisy
    return quantize(noisy, bits, full_scale)


def simulate_reception(spec, room, source, receiver, noise=NoiseSpec(),
                       t_wake=0.029, tau_rx=0.001, bits=12, max_order=None):
    """Snippet a node at `receiver` records when woken at `t_wake`."""
    trace = clean_reception(spec, room, source, receiver, t_wake, tau_rx, max_order)
    return receive(trace, noise, t_wake, tau_rx, bits)
