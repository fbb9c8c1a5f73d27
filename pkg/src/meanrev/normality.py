"""Shapiro-Wilk normality testing plus density-histogram and QQ-plot data.

The W statistic is the squared correlation between the ascending-sorted
sample and an antisymmetric coefficient vector derived from expected normal
order statistics. Exact order-statistic moments are intractable for general
n, so the coefficients use Royston's polynomial approximation and the
p-value uses his normalizing transformations (arcsine at n = 3, a
log-gamma form for 4 <= n <= 11, log-normal for n >= 12), valid for
3 <= n <= 5000.

The null hypothesis is normality; it is rejected when p_value < alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import (
    DegenerateSample,
    InsufficientData,
    SampleTooLarge,
    SampleTooSmall,
)

MAX_SAMPLE = 5000

# Polynomial corrections (ascending powers of 1/sqrt(n)) for the two
# outermost coefficients.
_C1 = (0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056)
_C2 = (0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633)

# Location/scale polynomials for the p-value transformations.
_C3 = (0.5440, -0.39978, 0.025054, -0.0006714)       # in n,      4 <= n <= 11
_C4 = (1.3822, -0.77857, 0.062767, -0.0020322)       # in n,      4 <= n <= 11
_C5 = (-1.5861, -0.31082, -0.083751, 0.0038915)      # in log n,  n >= 12
_C6 = (-0.4803, -0.082676, 0.0030302)                # in log n,  n >= 12
_G = (-2.273, 0.459)                                 # in n,      4 <= n <= 11

_PI6 = 6.0 / math.pi
_STQR = math.asin(math.sqrt(0.75))


def _poly(coeffs: tuple[float, ...], x: float) -> float:
    return sum(c * x**i for i, c in enumerate(coeffs))


@lru_cache(maxsize=64)
def _coefficients(n: int) -> np.ndarray:
    """Full antisymmetric coefficient vector a_1..a_n for sample size n.

    a_i = -a_{n+1-i} and sum(a_i^2) = 1 up to floating error. The n = 3
    vector is exact: (-sqrt(1/2), 0, sqrt(1/2)).
    """
    if n == 3:
        lower = np.array([-math.sqrt(0.5)])
    else:
        n2 = n // 2
        m = ndtri((np.arange(1, n2 + 1) - 0.375) / (n + 0.25))  # lower half, negative
        summ2 = 2.0 * float(m @ m)
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        a1 = _poly(_C1, rsn) - m[0] / ssumm2
        if n > 5:
            a2 = _poly(_C2, rsn) - m[1] / ssumm2
            fac = math.sqrt(
                (summ2 - 2.0 * m[0] ** 2 - 2.0 * m[1] ** 2)
                / (1.0 - 2.0 * a1**2 - 2.0 * a2**2)
            )
            lower = np.concatenate([[-a1, -a2], m[2:] / fac])
        else:
            fac = math.sqrt((summ2 - 2.0 * m[0] ** 2) / (1.0 - 2.0 * a1**2))
            lower = np.concatenate([[-a1], m[1:] / fac])
    middle = [0.0] if n % 2 else []
    full = np.concatenate([lower, middle, -lower[::-1]])
    full.flags.writeable = False
    return full


def _p_value(w: float, n: int) -> float:
    """Upper-tail p-value for an observed W at sample size n."""
    if w >= 1.0:
        return 1.0
    if n == 3:
        return min(1.0, max(0.0, _PI6 * (math.asin(math.sqrt(w)) - _STQR)))
    y = math.log(1.0 - w)
    if n <= 11:
        gamma = _poly(_G, float(n))
        if y >= gamma:
            return 0.0
        y = -math.log(gamma - y)
        mu = _poly(_C3, float(n))
        sigma = math.exp(_poly(_C4, float(n)))
    else:
        log_n = math.log(n)
        mu = _poly(_C5, log_n)
        sigma = math.exp(_poly(_C6, log_n))
    return float(ndtr(-(y - mu) / sigma))


@dataclass(frozen=True)
class NormalityReport:
    """Outcome of one Shapiro-Wilk run."""

    n: int
    w: float
    p_value: float
    alpha: float
    reject_normality: bool
    coefficients: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class QqPlotData:
    """Normal QQ-plot points plus a robust reference line.

    ``points`` is an (n, 2) array of (theoretical_quantile, sample_quantile)
    rows sorted ascending in the theoretical quantile. The reference line
    passes through (0, sample median) with an IQR-based slope.
    """

    points: np.ndarray
    reference_line: tuple[float, float]  # (slope, intercept)


def shapiro_wilk(xs: Sequence[float], alpha: float = 0.05) -> NormalityReport:
    """Test the null hypothesis that ``xs`` was drawn from a normal population.

    Valid for 3 <= n <= 5000. Ties are permitted; an all-equal sample is
    degenerate. ``reject_normality`` is ``p_value < alpha``.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha!r}")
    x = np.sort(np.asarray(xs, dtype=np.float64))
    n = len(x)
    if n < 3:
        raise SampleTooSmall(f"need n >= 3, got {n}")
    if n > MAX_SAMPLE:
        raise SampleTooLarge(f"approximation valid up to n = {MAX_SAMPLE}, got {n}")
    if x[0] == x[-1]:
        raise DegenerateSample("all observations equal")

    a = _coefficients(n)
    xc = x - x.mean()
    num = float(a @ xc) ** 2
    den = float(a @ a) * float(xc @ xc)
    if den == 0.0:
        raise DegenerateSample("zero variance in sample")
    w = min(1.0, num / den)
    p = _p_value(w, n)
    return NormalityReport(
        n=n, w=w, p_value=p, alpha=alpha,
        reject_normality=p < alpha, coefficients=a,
    )


def histogram_breaks(xs: Sequence[float]) -> np.ndarray:
    """Equal-width histogram bin edges under the Sturges rule.

    Provided for fidelity runs that apply the normality test to the bin
    breaks of a default histogram instead of the sample itself. Break points
    of any histogram are near-uniformly spaced, so testing them for
    normality says nothing about the data; prefer testing the raw sample.
    """
    return np.histogram_bin_edges(np.asarray(xs, dtype=np.float64), bins="sturges")


def density_histogram(xs: Sequence[float], bins: int | str = "auto") -> np.ndarray:
    """Normalized histogram as an (nbins, 2) array of (bin_center, density).

    Bins cover [min, max] and the densities integrate to 1. A constant
    sample yields a single unit-width bin centred on the value.
    """
    x = np.asarray(xs, dtype=np.float64)
    if len(x) < 2:
        raise InsufficientData(f"need >= 2 observations, got {len(x)}")
    densities, edges = np.histogram(x, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return np.column_stack([centers, densities])


def qq_plot_data(xs: Sequence[float]) -> QqPlotData:
    """Pair Blom-position normal quantiles with the sample order statistics.

    The i-th theoretical quantile sits at probability (i - 0.375)/(n + 0.25).
    """
    x = np.sort(np.asarray(xs, dtype=np.float64))
    n = len(x)
    if n < 3:
        raise InsufficientData(f"need >= 3 observations, got {n}")
    probs = (np.arange(1, n + 1) - 0.375) / (n + 0.25)
    theoretical = ndtri(probs)
    q25, q50, q75 = np.quantile(x, [0.25, 0.5, 0.75])
    slope = (q75 - q25) / (ndtri(0.75) - ndtri(0.25))
    return QqPlotData(
        points=np.column_stack([theoretical, x]),
        reference_line=(float(slope), float(q50)),
    )
