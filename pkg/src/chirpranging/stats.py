"""
Summary statistics of distance estimates.

Percentiles use the nearest-rank rule so that every value reported is an
observed sample.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ParameterError

KDE_POINTS_PER_BANDWIDTH = 20
KDE_MAX_POINTS = 20001


@dataclass(frozen=True)
class ErrorStats:
    mean: float
    p50: float
    p95: float
    p100: float
    epsilon: float
    sigma: float
    n: int

    def as_dict(self):
        return {k: getattr(self, k) for k in
                ("n", "mean", "p50", "p95", "p100", "epsilon", "sigma")}


@dataclass(frozen=True, eq=False)
class DensityEstimate:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def mass(self):
        return float(np.trapezoid(self.density, self.grid))

    def modes(self):
        """Grid positions of strict local maxima of the density."""
        d = self.density
        inner = (d[1:-1] > d[:-2]) & (d[1:-1] >= d[2:])
        return self.grid[1:-1][inner]


def gaussian_fit(samples):
    """Sample mean and standard deviation (n - 1 denominator)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise ParameterError(f"gaussian_fit needs at least 2 samples, got {x.size}")
    return float(x.mean()), float(x.std(ddof=1))


def nearest_rank(sorted_values, pct):
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return float(sorted_values[rank - 1])


def error_metrics(errors, signed=None):
    """Mean and nearest-rank P50/P95/P100 of `errors`.

    Parameters
    ----------
    errors : array_like
        Usually absolute distance errors.
    signed : array_like, optional
        Signed errors (estimate minus truth) for the Gaussian fit; epsilon is
        the magnitude of their mean and sigma their standard deviation.
        Defaults to `errors`.
    """
    e = np.asarray(errors, dtype=float)
    if e.size == 0:
        raise ParameterError("error_metrics needs at least one sample")
    s = e if signed is None else np.asarray(signed, dtype=float)
    if s.size >= 2:
        mu, sigma = gaussian_fit(s)
    else:
        mu, sigma = float(s.mean()), 0.0
    srt = np.sort(e)
    return ErrorStats(
        mean=float(e.mean()),
        p50=nearest_rank(srt, 50),
        p95=nearest_rank(srt, 95),
        p100=float(srt[-1]),
        epsilon=abs(mu),
        sigma=sigma,
        n=int(e.size),
    )


def silverman_bandwidth(samples):
    """``0.9 * min(std, IQR / 1.34) * n**(-1/5)``.

    When one of the spread measures is zero the other is used; zero spread
    overall is an error.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise ParameterError("bandwidth selection needs at least 2 samples")
    std = x.std(ddof=1)
    q75, q25 = np.percentile(x, [75, 25])
    spread = [s for s in (std, (q75 - q25) / 1.34) if s > 0]
    if not spread:
        raise ParameterError("samples have zero spread; choose a bandwidth explicitly")
    return 0.9 * min(spread) * n ** (-0.2)


def epanechnikov_kernel(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def default_grid(samples, bandwidth):
    x = np.asarray(samples, dtype=float)
    lo, hi = x.min() - bandwidth, x.max() + bandwidth
    n = int(np.clip((hi - lo) / bandwidth * KDE_POINTS_PER_BANDWIDTH + 1, 101, KDE_MAX_POINTS))
    return np.linspace(lo, hi, n)


def epanechnikov_kde(samples, bandwidth=None, grid=None):
    """Kernel density estimate with the Epanechnikov kernel.

    ``density(x) = sum_i K((x - x_i) / h) / (n h)`` with
    ``K(u) = 0.75 (1 - u^2)`` on ``|u| <= 1``.
    """
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise ParameterError("epanechnikov_kde needs at least one sample")
    if bandwidth is None:
        bandwidth = silverman_bandwidth(x)
    if not bandwidth > 0:
        raise ParameterError(f"bandwidth must be > 0, got {bandwidth}")
    if grid is None:
        grid = default_grid(x, bandwidth)
    grid = np.asarray(grid, dtype=float)
    xs = np.sort(x)
    density = np.empty(grid.size)
    # Only samples within one bandwidth contribute; chunk to bound memory.
    for start in range(0, grid.size, 256):
        g = grid[start:start + 256]
        lo = np.searchsorted(xs, g.min() - bandwidth)
        hi = np.searchsorted(xs, g.max() + bandwidth, side="right")
        u = (g[:, None] - xs[None, lo:hi]) / bandwidth
        density[start:start + 256] = epanechnikov_kernel(u).sum(axis=1)
    density /= x.size * bandwidth
    return DensityEstimate(grid, density, float(bandwidth))


def empirical_cdf(errors):
    """Right-continuous empirical CDF as (value, fraction <= value) pairs.

    Repeated values appear once, carrying the fraction after the jump.
    """
    e = np.sort(np.asarray(errors, dtype=float))
    if e.size == 0:
        raise ParameterError("empirical_cdf needs at least one sample")
    values, counts = np.unique(e, return_counts=True)
    frac = np.cumsum(counts) / e.size
    return list(zip(values.tolist(), frac.tolist()))


def cdf_at(errors, x):
    """Fraction of `errors` that are <= `x`."""
    e = np.asarray(errors, dtype=float)
    return float(np.count_nonzero(e <= x)) / e.size
