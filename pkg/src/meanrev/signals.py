"""Per-date trading verdicts from the rolling 2-sigma band rule, plus
next-day return extrapolation from the return-series slope.

The band at a date is k times the sample standard deviation of the
``window`` returns strictly before that date, so the band always predates
the observation it judges (no lookahead). A breach of either sign yields
the same long-next-day verdict by default; ``short_on_positive`` flips the
verdict for upside breaches, for experimentation only.

The slope extrapolation is advisory metadata on the decision, not a gating
condition: it is computed and reported but never alters the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .errors import InsufficientData, InsufficientHistory, UnknownDate, ZeroVariance
from .returns import MODES, ReturnSeries

LONG_NEXT_DAY = "long-next-day"
SHORT_NEXT_DAY = "short-next-day"
NO_DIRECTION = "none"


@dataclass(frozen=True)
class BandConfig:
    """Rolling-band parameters: one year of trading days, two sigmas."""

    window: int = 252
    k: float = 2.0
    mode: str = "simple"
    short_on_positive: bool = False

    def __post_init__(self):
        if self.window < 30:
            raise ValueError(f"window must be >= 30 trading days, got {self.window}")
        if not self.k > 0.0:
            raise ValueError(f"k must be positive, got {self.k}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class MomentumEstimate:
    """Linear next-day extrapolation R_1 = M * t + R_0 over trading days."""

    slope_m: float
    r0: float
    r1_forecast: float
    t_span: int  # forecast horizon in trading days; always 1 step ahead


@dataclass(frozen=True)
class SignalDecision:
    date: date
    today_return: float
    sigma: float
    band: float
    triggered: bool
    direction: str
    expected_range: tuple[float, float] | None
    momentum: MomentumEstimate


def _rolling_std(values: np.ndarray, window: int) -> np.ndarray:
    """Sample std dev of each length-``window`` slice strictly before index
    window..len-1. Two-pass, n-1 denominator."""
    views = np.lib.stride_tricks.sliding_window_view(values, window)[:-1]
    means = views.mean(axis=1)
    ssq = ((views - means[:, None]) ** 2).sum(axis=1)
    return np.sqrt(ssq / (window - 1))


def rolling_sigma(returns: ReturnSeries, config: BandConfig) -> list[tuple[date, float]]:
    """(date, sigma) for every date with at least ``window`` prior returns.

    Sigma at a date uses only points strictly before it.
    """
    if len(returns) < config.window + 1:
        raise InsufficientData(
            f"need >= {config.window + 1} returns for a window of {config.window}, "
            f"got {len(returns)}"
        )
    sigmas = _rolling_std(returns.values, config.window)
    return [(d, float(s)) for d, s in zip(returns.dates[config.window:], sigmas)]


def momentum_estimate(
    returns: ReturnSeries, at: date, lookback_pairs: int = 1
) -> MomentumEstimate:
    """Slope of the return series at ``at`` and the implied next-day value.

    The slope averages the most recent ``lookback_pairs`` consecutive-return
    differences (trading-day spacing = 1); the forecast extrapolates one
    trading day ahead.
    """
    if lookback_pairs < 1:
        raise ValueError(f"lookback_pairs must be >= 1, got {lookback_pairs}")
    i = returns.index_of(at)
    if i is None:
        raise UnknownDate(f"{at.isoformat()} not in return series {returns.ticker}")
    if i < lookback_pairs:
        raise InsufficientHistory(
            f"need {lookback_pairs + 1} returns at {at.isoformat()}, have {i + 1}"
        )
    window = returns.values[i - lookback_pairs : i + 1]
    slope = float(np.diff(window).mean())
    r0 = float(returns.values[i])
    return MomentumEstimate(slope_m=slope, r0=r0, r1_forecast=slope * 1 + r0, t_span=1)


def evaluate_signal(returns: ReturnSeries, at: date, config: BandConfig) -> SignalDecision:
    """Apply the band rule at one date.

    Triggered when |today's return| exceeds k * sigma of the trailing
    window; both breach signs map to a long-next-day verdict (unless
    ``short_on_positive`` is set), with an expected next-day return range
    of (0, band).
    """
    i = returns.index_of(at)
    if i is None:
        raise UnknownDate(f"{at.isoformat()} not in return series {returns.ticker}")
    if i < config.window:
        raise InsufficientHistory(
            f"need {config.window} prior returns at {at.isoformat()}, have {i}"
        )
    # Same code path as the batched scan so marginal breaches agree bitwise.
    sigma = float(_rolling_std(returns.values[i - config.window : i + 1], config.window)[0])
    if sigma == 0.0:
        raise ZeroVariance(f"rolling window before {at.isoformat()} is constant")

    today = float(returns.values[i])
    band = config.k * sigma
    triggered = abs(today) > band
    if not triggered:
        direction = NO_DIRECTION
    elif config.short_on_positive and today > 0.0:
        direction = SHORT_NEXT_DAY
    else:
        direction = LONG_NEXT_DAY
    return SignalDecision(
        date=at,
        today_return=today,
        sigma=sigma,
        band=band,
        triggered=triggered,
        direction=direction,
        expected_range=(0.0, band) if triggered else None,
        momentum=momentum_estimate(returns, at),
    )


def band_csv_text(returns: ReturnSeries, config: BandConfig) -> str:
    """``Date,Sigma,UpperBand,LowerBand`` CSV over the evaluable dates."""
    lines = ["Date,Sigma,UpperBand,LowerBand"]
    for d, s in rolling_sigma(returns, config):
        b = config.k * s
        lines.append(f"{d.isoformat()},{s:.10g},{b:.10g},{-b:.10g}")
    return "\n".join(lines) + "\n"


def write_band_csv(returns: ReturnSeries, config: BandConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(band_csv_text(returns, config))
