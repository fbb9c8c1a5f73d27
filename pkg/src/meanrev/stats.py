"""Sample statistics kernels: mean, variance, covariance, correlation,
and the sample standard score.

All dispersion denominators are n-1; there is no population-variance
option. Sums run through ``math.fsum`` so results are identical across
evaluation orders, which keeps golden values stable to 1e-12.

A constant sample where dispersion is required raises
:class:`~meanrev.errors.ZeroVariance` rather than propagating a NaN,
because downstream band logic cannot interpret NaN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientData, LengthMismatch, NoOverlap, ZeroVariance
from .returns import ReturnSeries


@dataclass(frozen=True)
class SampleStats:
    n: int
    mean: float
    variance: float
    std_dev: float


@dataclass(frozen=True)
class StandardScore:
    """Sample standard score: (x - mean) / (sigma / sqrt(n))."""

    value: float
    x: float
    mean: float
    sigma: float
    n: int


def sample_stats(xs: Sequence[float]) -> SampleStats:
    """Mean, n-1 variance, and standard deviation of a sample of >= 2 values."""
    xs = [float(x) for x in xs]
    n = len(xs)
    if n < 2:
        raise InsufficientData(f"need >= 2 observations, got {n}")
    mean = math.fsum(xs) / n
    variance = math.fsum((x - mean) ** 2 for x in xs) / (n - 1)
    return SampleStats(n=n, mean=mean, variance=variance, std_dev=math.sqrt(variance))


def covariance(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample covariance with n-1 denominator."""
    xs = [float(x) for x in xs]
    ys = [float(y) for y in ys]
    if len(xs) != len(ys):
        raise LengthMismatch(f"lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise InsufficientData(f"need >= 2 observations, got {n}")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    return math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys)) / (n - 1)


def correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation Cov(X,Y)/(Sx*Sy), in [-1, 1].

    Raises ZeroVariance if either sample is constant. The result is clamped
    to [-1, 1] only against floating-point overshoot (<= 1e-12).
    """
    cov = covariance(xs, ys)
    sx = sample_stats(xs).std_dev
    sy = sample_stats(ys).std_dev
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("correlation undefined for a constant sample")
    c = cov / (sx * sy)
    return min(1.0, max(-1.0, c))


def standard_score(x: float, xs: Sequence[float]) -> StandardScore:
    """Score an observation against a sample: (x - mean) / (sigma / sqrt(n))."""
    stats = sample_stats(xs)
    if stats.std_dev == 0.0:
        raise ZeroVariance("standard score undefined for a constant sample")
    value = (float(x) - stats.mean) / (stats.std_dev / math.sqrt(stats.n))
    return StandardScore(value=value, x=float(x), mean=stats.mean, sigma=stats.std_dev, n=stats.n)


def align_by_date(a: ReturnSeries, b: ReturnSeries) -> tuple[np.ndarray, np.ndarray]:
    """Inner-join two return series on date.

    Returns equal-length value arrays ordered by date. Raises NoOverlap when
    the date sets are disjoint.
    """
    b_by_date = dict(zip(b.dates, b.values))
    xs, ys = [], []
    for d, v in zip(a.dates, a.values):
        if d in b_by_date:
            xs.append(v)
            ys.append(b_by_date[d])
    if not xs:
        raise NoOverlap(f"no common dates between {a.ticker} and {b.ticker}")
    return np.asarray(xs, dtype=np.float64), np.asarray(ys, dtype=np.float64)
