import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from chirpranging.errors import ParameterError
from chirpranging.stats import (cdf_at, empirical_cdf, epanechnikov_kde, error_metrics,
                                gaussian_fit, silverman_bandwidth)


def test_gaussian_fit_examples():
    assert gaussian_fit([2.5, 2.5, 2.5]) == (2.5, 0.0)
    mu, sd = gaussian_fit([1.0, 3.0])
    assert mu == 2.0 and sd == pytest.approx(math.sqrt(2))
    with pytest.raises(ParameterError):
        gaussian_fit([1.0])


def test_gaussian_fit_recovers_parameters():
    x = np.random.default_rng(2024).normal(1.553, 0.02, 10_000)
    mu, sd = gaussian_fit(x)
    assert abs(mu - 1.553) < 0.001
    assert abs(sd - 0.02) / 0.02 < 0.10


def test_kde_single_sample():
    d = epanechnikov_kde([0.0], bandwidth=1.0, grid=np.array([-1.0, 0.0, 1.0]))
    assert d.density.tolist() == [0.0, 0.75, 0.0]


@given(arrays(np.float64, st.integers(2, 300), elements=st.floats(-5, 5)),
       st.floats(0.05, 3))
def test_kde_mass_and_sign(x, h):
    d = epanechnikov_kde(x, bandwidth=h, grid=np.linspace(x.min() - h, x.max() + h, 4001))
    assert np.all(d.density >= 0)
    assert 0.98 <= d.mass() <= 1.02


def test_kde_default_bandwidth_mass():
    x = np.random.default_rng(0).normal(0, 1, 2000)
    d = epanechnikov_kde(x)
    assert d.bandwidth == pytest.approx(silverman_bandwidth(x))
    assert 0.98 <= d.mass() <= 1.02


def test_kde_bimodal_wavelength_offset():
    # direct-path cluster plus an echo cluster one 35 kHz wavelength later
    rng = np.random.default_rng(6)
    lam = 340 / 35000
    x = np.r_[rng.normal(1.553, 0.001, 700), rng.normal(1.553 + lam, 0.001, 300)]
    modes = epanechnikov_kde(x, bandwidth=0.002).modes()
    assert len(modes) == 2
    assert modes[1] - modes[0] == pytest.approx(lam, abs=0.002)


def test_kde_bandwidth_limits():
    x = np.array([0.0, 1.0, 3.0])
    narrow = epanechnikov_kde(x, bandwidth=0.01)
    assert len(narrow.modes()) == 3
    grid = np.linspace(-20, 20, 4001)
    assert len(epanechnikov_kde(x, bandwidth=15.0, grid=grid).modes()) == 1


def test_silverman_zero_spread():
    with pytest.raises(ParameterError):
        silverman_bandwidth([1.0, 1.0, 1.0])


def test_error_metrics_nearest_rank():
    st_ = error_metrics(np.arange(1, 101, dtype=float))
    assert (st_.p50, st_.p95, st_.p100) == (50.0, 95.0, 100.0)
    assert st_.mean == 50.5 and st_.n == 100


def test_error_metrics_single_sample():
    s = error_metrics([0.25])
    assert s.mean == s.p50 == s.p95 == s.p100 == 0.25
    assert s.sigma == 0.0


def test_error_metrics_signed_fit():
    signed = np.array([-0.1, 0.3, 0.2, -0.05])
    s = error_metrics(np.abs(signed), signed=signed)
    mu, sd = gaussian_fit(signed)
    assert s.epsilon == pytest.approx(abs(mu))
    assert s.sigma == pytest.approx(sd)
    # gaussian_fit mean equals error_metrics mean on the same signed input
    assert error_metrics(signed).mean == pytest.approx(mu)


@given(arrays(np.float64, st.integers(1, 200), elements=st.floats(0, 100)), st.randoms())
def test_error_metrics_invariants(e, rnd):
    s = error_metrics(e)
    assert s.p50 <= s.p95 <= s.p100
    assert s.sigma >= 0 and s.n >= 1
    perm = e.copy()
    rnd.shuffle(perm)
    assert error_metrics(perm) == s or _close(error_metrics(perm), s)


def _close(a, b):
    return all(math.isclose(getattr(a, k), getattr(b, k), rel_tol=1e-12, abs_tol=1e-12)
               for k in ("mean", "p50", "p95", "p100", "epsilon", "sigma"))


def test_empirical_cdf_examples():
    assert empirical_cdf([0.1]) == [(0.1, 1.0)]
    cdf = empirical_cdf([0.3, 0.1, 0.1, 0.2])
    assert cdf == [(0.1, 0.5), (0.2, 0.75), (0.3, 1.0)]
    assert cdf_at([0.3, 0.1, 0.1, 0.2], 0.15) == 0.5


@given(arrays(np.float64, st.integers(1, 200), elements=st.floats(0, 10)))
def test_empirical_cdf_monotone(e):
    cdf = empirical_cdf(e)
    fr = [f for _, f in cdf]
    assert all(a < b for a, b in zip(fr, fr[1:]))
    assert fr[-1] == 1.0 and fr[0] > 0


def test_cdf_consistent_with_p50():
    e = np.random.default_rng(1).exponential(0.06, 600)
    s = error_metrics(e)
    assert cdf_at(e, s.p50) >= 0.5
    if s.p50 <= 0.10:
        assert cdf_at(e, 0.10) >= 0.5
