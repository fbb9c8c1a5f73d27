"""Scan a ticker universe and emit the names whose latest return breaches
the band while the trailing return sample still looks normal.

A probability statement about the next day is only meaningful if the
return distribution passed a normality check first, so normality gating is
a hard precondition here, evaluated on the same rolling window the band
uses. Tickers failing any precondition land in ``skipped`` with a
machine-readable reason; candidates are ranked by breach ratio
|today's return| / band, a scale-free order.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Sequence

from .errors import DegenerateSample, EmptyUniverse
from .market_data import PriceSeries
from .normality import MAX_SAMPLE, NormalityReport, shapiro_wilk
from .returns import daily_returns
from .signals import BandConfig, MomentumEstimate, _rolling_std, momentum_estimate

DEFAULT_MIN_HISTORY = 756   # three years of trading days
DEFAULT_STALENESS = 5       # trading days behind as_of before a ticker is stale

REASON_STALE = "Stale"
REASON_INSUFFICIENT_HISTORY = "InsufficientHistory"
REASON_ZERO_VARIANCE = "ZeroVariance"
REASON_NORMALITY_REJECTED = "NormalityRejected"
REASON_NOT_TRIGGERED = "NotTriggered"


@dataclass(frozen=True)
class Candidate:
    ticker: str
    as_of: date
    today_return: float
    band: float
    breach_ratio: float
    normality: NormalityReport
    momentum: MomentumEstimate


@dataclass(frozen=True)
class SkippedTicker:
    ticker: str
    reason: str
    detail: str = ""


@dataclass(frozen=True)
class ScreenResult:
    as_of: date
    candidates: tuple[Candidate, ...]
    skipped: tuple[SkippedTicker, ...]


def _trading_day_lag(calendar: list[date], last: date, as_of: date) -> int:
    """Positions between ``last`` and ``as_of`` in the observed calendar."""
    return bisect.bisect_right(calendar, as_of) - bisect.bisect_right(calendar, last)


def screen(
    universe: Sequence[PriceSeries],
    config: BandConfig,
    alpha: float = 0.05,
    *,
    as_of: date | None = None,
    min_history: int = DEFAULT_MIN_HISTORY,
    staleness_days: int = DEFAULT_STALENESS,
    full_history_normality: bool = False,
) -> ScreenResult:
    """Evaluate every ticker at its latest bar on or before ``as_of``.

    ``as_of`` defaults to the newest bar date in the universe. Staleness is
    measured in trading days on the calendar observed across the whole
    universe. With ``full_history_normality`` the normality gate tests the
    entire return history before the evaluation date (clipped to the most
    recent 5000 points) instead of the band window.

    Candidates and skips partition the input universe exactly; screening is
    insensitive to universe order.
    """
    if len(universe) == 0:
        raise EmptyUniverse("no tickers to screen")
    tickers = [s.ticker for s in universe]
    if len(set(tickers)) != len(tickers):
        raise ValueError("duplicate tickers in universe")

    all_dates = sorted({b.date for s in universe for b in s.bars})
    if not all_dates:
        raise EmptyUniverse("no bars in any universe series")
    if as_of is None:
        as_of = all_dates[-1]
    calendar = [d for d in all_dates if d <= as_of]

    candidates: list[Candidate] = []
    skipped: list[SkippedTicker] = []
    for series in universe:
        bars = tuple(b for b in series.bars if b.date <= as_of)
        if not bars:
            skipped.append(
                SkippedTicker(series.ticker, REASON_INSUFFICIENT_HISTORY,
                              "no bars on or before as_of")
            )
            continue
        lag = _trading_day_lag(calendar, bars[-1].date, as_of)
        if lag > staleness_days:
            skipped.append(
                SkippedTicker(series.ticker, REASON_STALE,
                              f"last bar {bars[-1].date.isoformat()} is "
                              f"{lag} trading days behind as_of")
            )
            continue
        if len(bars) < max(min_history, config.window + 2):
            skipped.append(
                SkippedTicker(series.ticker, REASON_INSUFFICIENT_HISTORY,
                              f"{len(bars)} bars < required "
                              f"{max(min_history, config.window + 2)}")
            )
            continue

        returns = daily_returns(PriceSeries(series.ticker, bars), mode=config.mode)
        i = len(returns) - 1
        sigma = float(_rolling_std(returns.values[i - config.window : i + 1], config.window)[0])
        if sigma == 0.0:
            skipped.append(
                SkippedTicker(series.ticker, REASON_ZERO_VARIANCE,
                              "rolling window before the latest date is constant")
            )
            continue

        if full_history_normality:
            sample = returns.values[max(0, i - MAX_SAMPLE) : i]
        else:
            sample = returns.values[i - config.window : i]
        try:
            normality = shapiro_wilk(sample, alpha)
        except DegenerateSample:
            skipped.append(
                SkippedTicker(series.ticker, REASON_ZERO_VARIANCE,
                              "normality sample is constant")
            )
            continue
        if normality.reject_normality:
            skipped.append(
                SkippedTicker(series.ticker, REASON_NORMALITY_REJECTED,
                              f"p_value {normality.p_value:.6g} < alpha {alpha:g}")
            )
            continue

        today = float(returns.values[i])
        band = config.k * sigma
        if abs(today) <= band:
            skipped.append(
                SkippedTicker(series.ticker, REASON_NOT_TRIGGERED,
                              f"|return| {abs(today):.6g} within band {band:.6g}")
            )
            continue
        candidates.append(
            Candidate(
                ticker=series.ticker,
                as_of=returns.dates[i],
                today_return=today,
                band=band,
                breach_ratio=abs(today) / band,
                normality=normality,
                momentum=momentum_estimate(returns, returns.dates[i]),
            )
        )

    candidates.sort(key=lambda c: (-c.breach_ratio, c.ticker))
    skipped.sort(key=lambda s: s.ticker)
    return ScreenResult(as_of=as_of, candidates=tuple(candidates), skipped=tuple(skipped))


def read_universe_manifest(path: str | Path) -> list[str]:
    """Tickers from a plain-text manifest: one per line, '#' starts a comment."""
    tickers: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            name = line.split("#", 1)[0].strip()
            if name:
                tickers.append(name.upper())
    return tickers
