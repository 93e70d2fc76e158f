import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from chirpranging.errors import GeometryError, ParameterError, RateMismatchError
from chirpranging.room import (RoomSpec, clean_reception, compute_rir, convolve,
                               default_max_order, image_sources, simulate_reception)
from chirpranging.signals import (ChirpSpec, NoiseSpec, Waveform, extract_window,
                                  generate_chirp)

FS = 196000.0


def test_room_spec_validation():
    for kw in (dict(dims=(0, 4, 2.5)), dict(absorption=1.2), dict(speed_of_sound=0)):
        with pytest.raises(ParameterError):
            RoomSpec(**kw)


def test_default_source_offset():
    assert RoomSpec().default_source() == (3.1, 2.1, 1.0)


def test_direct_only_tap():
    room = RoomSpec(dims=(6, 4, 2.5), absorption=0.3)
    rir = compute_rir(room, (1.0, 1.0, 1.0), (2.7, 1.0, 1.0), FS, max_order=0)
    nz = np.flatnonzero(rir.taps.samples)
    assert nz.tolist() == [980]
    assert rir.taps.samples[980] == pytest.approx(1 / (4 * math.pi * 1.7))


def test_fully_absorbing_equals_order_zero():
    room = RoomSpec(absorption=1.0)
    src, rcv = (3.1, 2.1, 1.0), (1.0, 0.7, 1.2)
    a = compute_rir(room, src, rcv, FS, max_order=6, length=0.03)
    b = compute_rir(room, src, rcv, FS, max_order=0, length=0.03)
    np.testing.assert_array_equal(a.taps.samples, b.taps.samples)


def test_first_order_reflection_amplitude():
    room = RoomSpec(dims=(6, 4, 2.5), absorption=0.9)
    assert room.reflection == pytest.approx(0.316227766, abs=1e-9)
    src, rcv = (3.0, 2.0, 1.25), (4.0, 2.0, 1.25)
    rir = compute_rir(room, src, rcv, FS, max_order=1, length=0.05)
    # image behind the x = 6 wall: x' = 9
    d = 5.0
    idx = int(round(d / 340 * FS))
    assert rir.taps.samples[idx] == pytest.approx(math.sqrt(0.1) / (4 * math.pi * d))


def test_points_outside_room():
    room = RoomSpec()
    with pytest.raises(GeometryError):
        compute_rir(room, (7, 1, 1), (1, 1, 1), FS)
    with pytest.raises(GeometryError):
        compute_rir(room, (1, 1, 1), (1, 0, 1), FS)


def test_coincident_points():
    with pytest.raises(GeometryError):
        compute_rir(RoomSpec(), (1, 1, 1), (1, 1, 1), FS)


def test_length_shorter_than_direct_path():
    with pytest.raises(ParameterError):
        compute_rir(RoomSpec(), (1, 1, 1), (4, 3, 1), FS, length=0.001)


def _lattice_images(room, src, n_max):
    # Allen-Berkley lattice: coordinate (1 - 2q) s + 2 m L has |2m - q| reflections.
    per_axis = []
    for a in range(3):
        opts = []
        for q in (0, 1):
            for m in range(-n_max - 1, n_max + 2):
                k = abs(2 * m - q)
                if k <= n_max:
                    opts.append(((1 - 2 * q) * src[a] + 2 * m * room.dims[a], k))
        per_axis.append(opts)
    out = []
    for (x, kx), (y, ky), (z, kz) in itertools.product(*per_axis):
        if kx + ky + kz <= n_max:
            out.append((round(x, 9), round(y, 9), round(z, 9), kx + ky + kz))
    return sorted(out)


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_image_count_matches_lattice(n):
    room = RoomSpec(dims=(6.0, 4.0, 2.5))
    src = (3.1, 2.1, 1.0)
    pos, orders = image_sources(room, src, n)
    got = sorted((round(x, 9), round(y, 9), round(z, 9), int(k))
                 for (x, y, z), k in zip(pos.tolist(), orders.tolist()))
    assert got == _lattice_images(room, src, n)
    # closed form for 3-D shoebox image counts: 1, 7, 25, 63
    assert len(got) == [1, 7, 25, 63][n]


def test_default_max_order_bounds():
    src, rcv = (3.1, 2.1, 1.0), (2.0, 1.0, 1.0)
    assert default_max_order(RoomSpec(absorption=0.9), src, rcv) <= 12
    assert default_max_order(RoomSpec(absorption=0.05), src, rcv) == 12
    assert default_max_order(RoomSpec(absorption=0.9), src, rcv) < \
        default_max_order(RoomSpec(absorption=0.3), src, rcv)


points = st.tuples(st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0.05, 0.95))


@given(st.tuples(st.floats(1, 8), st.floats(1, 8), st.floats(1, 4)), points, points,
       st.floats(0, 1))
def test_direct_tap_index_property(dims, fs, fr, alpha):
    room = RoomSpec(dims=dims, absorption=alpha)
    src = tuple(f * d for f, d in zip(fs, dims))
    rcv = tuple(f * d for f, d in zip(fr, dims))
    d = math.dist(src, rcv)
    assume(d > 1e-6)
    rir = compute_rir(room, src, rcv, FS, max_order=2)
    first = np.flatnonzero(rir.taps.samples)[0]
    assert first == round(FS * d / 340)


@given(points, points)
def test_reciprocity(fs, fr):
    room = RoomSpec(absorption=0.3)
    src = tuple(f * d for f, d in zip(fs, room.dims))
    rcv = tuple(f * d for f, d in zip(fr, room.dims))
    assume(math.dist(src, rcv) > 1e-6)
    a = compute_rir(room, src, rcv, FS, max_order=3, length=0.04)
    b = compute_rir(room, rcv, src, FS, max_order=3, length=0.04)
    np.testing.assert_allclose(a.taps.samples, b.taps.samples, rtol=1e-12, atol=1e-15)


def test_energy_non_increasing_in_alpha():
    src, rcv = (3.1, 2.1, 1.0), (1.3, 0.9, 1.0)
    energies = [np.sum(compute_rir(RoomSpec(absorption=a), src, rcv, FS, max_order=4,
                                   length=0.05).taps.samples ** 2)
                for a in np.linspace(0, 1, 11)]
    assert all(e1 >= e2 for e1, e2 in zip(energies, energies[1:]))


def test_convolve_identity_and_shift():
    rng = np.random.default_rng(1)
    x = Waveform(rng.standard_normal(40), FS)
    out = convolve(x, Waveform(np.array([1.0]), FS))
    np.testing.assert_array_equal(out.samples, x.samples)
    k = 7
    out = convolve(x, Waveform(np.eye(1, k + 1, k).ravel(), FS))
    np.testing.assert_allclose(out.samples[k:k + 40], x.samples)
    assert not np.any(out.samples[:k])


def test_convolve_brute_force():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(64)
    h = rng.standard_normal(16)
    ref = np.zeros(64 + 16 - 1)
    for i in range(64):
        for j in range(16):
            ref[i + j] += x[i] * h[j]
    out = convolve(Waveform(x, FS), Waveform(h, FS))
    np.testing.assert_allclose(out.samples, ref, rtol=1e-12, atol=1e-12)


def test_convolve_rate_mismatch():
    with pytest.raises(RateMismatchError):
        convolve(Waveform(np.ones(3), FS), Waveform(np.ones(2), 1000.0))


def test_free_field_snippet_is_delayed_scaled_chirp():
    spec = ChirpSpec()
    room = RoomSpec(dims=(20, 20, 5), absorption=1.0)
    src = (10.0, 10.0, 2.0)
    d = 340 * 2450 / FS   # integer sample delay
    rcv = (10.0 + d, 10.0, 2.0)
    snip = simulate_reception(spec, room, src, rcv, NoiseSpec(), 0.029, 0.001, bits=None)
    chirp = generate_chirp(spec)
    expect = extract_window(chirp, 0.029 - d / 340, 0.001).samples / (4 * math.pi * d)
    np.testing.assert_allclose(snip.samples, expect, atol=1e-12)


def test_out_of_range_receiver_hears_no_direct_path():
    spec = ChirpSpec()
    room = RoomSpec(dims=(30, 30, 5), absorption=1.0)
    src = (2.0, 2.0, 2.0)
    rcv = (14.0, 2.0, 2.0)   # 12 m: d/c > 30 ms, later than the whole window
    snip = simulate_reception(spec, room, src, rcv, NoiseSpec(), 0.029, 0.001, bits=None)
    # FFT convolution leaves round-off of order 1e-18; the direct path would be ~7e-3
    assert np.max(np.abs(snip.samples)) < 1e-12


def test_clean_reception_covers_window():
    spec = ChirpSpec()
    trace = clean_reception(spec, RoomSpec(), (3.1, 2.1, 1.0), (1.0, 1.0, 1.0), 0.029, 0.001)
    assert trace.duration >= 0.030


def test_simulate_reception_defaults_and_quantization():
    spec = ChirpSpec()
    snip = simulate_reception(spec, RoomSpec(absorption=0.9), (3.1, 2.1, 1.0), (2.0, 1.0, 1.0),
                              NoiseSpec(20.0, 5))
    assert len(snip) == 196
    assert snip.t0 == 0.029
    steps = np.unique(np.round(np.diff(np.unique(snip.samples)) / np.min(
        np.diff(np.unique(snip.samples))), 6))
    assert np.allclose(steps, np.round(steps))
