"""Replay the band rule over history and measure next-day outcomes.

Every date whose absolute return breaches the rolling band becomes a
trigger event paired with the immediately following trading day's return.
Triggers on the final date of a series have no next day yet; they are
excluded from the aggregates and counted as ``open_triggers``. Overlapping
triggers on consecutive days count as independent events.

The headline aggregate ``p_positive`` is the fraction of events whose
next-day return was positive. On i.i.d. symmetric returns it converges to
0.5 regardless of the rule; any excess is a property of the data, not of
the band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InsufficientData
from .returns import ReturnSeries
from .signals import BandConfig, _rolling_std


@dataclass(frozen=True)
class TriggerEvent:
    ticker: str
    trigger_date: date
    trigger_return: float
    band: float
    next_date: date
    next_return: float
    reverted_positive: bool
    within_expected_range: bool


@dataclass(frozen=True)
class TickerBreakdown:
    n_triggers: int
    open_triggers: int
    p_positive: float | None
    p_within_range: float | None
    mean_next_return: float | None


@dataclass(frozen=True)
class BacktestReport:
    config: BandConfig
    events: tuple[TriggerEvent, ...]
    n_triggers: int
    open_triggers: int
    p_positive: float | None
    p_within_range: float | None
    mean_next_return: float | None
    per_ticker: Mapping[str, TickerBreakdown]


def _aggregate(events: Sequence[TriggerEvent], open_triggers: int) -> TickerBreakdown:
    n = len(events)
    if n == 0:
        return TickerBreakdown(0, open_triggers, None, None, None)
    return TickerBreakdown(
        n_triggers=n,
        open_triggers=open_triggers,
        p_positive=sum(e.reverted_positive for e in events) / n,
        p_within_range=sum(e.within_expected_range for e in events) / n,
        mean_next_return=math.fsum(e.next_return for e in events) / n,
    )


def run_backtest(serieses: Sequence[ReturnSeries], config: BandConfig) -> BacktestReport:
    """Extract every trigger event from one or more return series.

    Series too short for a single band evaluation are ignored; if none is
    evaluable the backtest raises InsufficientData. Dates whose trailing
    window is constant (sigma = 0) are skipped: no band exists there.
    Deterministic given identical inputs.
    """
    evaluable = [rs for rs in serieses if len(rs) >= config.window + 1]
    if not evaluable:
        raise InsufficientData(
            f"no series has the >= {config.window + 1} returns a "
            f"window of {config.window} requires"
        )

    events: list[TriggerEvent] = []
    open_by_ticker: dict[str, int] = {}
    for rs in sorted(evaluable, key=lambda r: r.ticker):
        sigmas = _rolling_std(rs.values, config.window)
        open_by_ticker[rs.ticker] = 0
        for j, sigma in enumerate(sigmas):
            if sigma == 0.0:
                continue
            i = config.window + j
            r = float(rs.values[i])
            band = config.k * float(sigma)
            if abs(r) <= band:
                continue
            if i + 1 >= len(rs):
                open_by_ticker[rs.ticker] += 1
                continue
            nxt = float(rs.values[i + 1])
            events.append(
                TriggerEvent(
                    ticker=rs.ticker,
                    trigger_date=rs.dates[i],
                    trigger_return=r,
                    band=band,
                    next_date=rs.dates[i + 1],
                    next_return=nxt,
                    reverted_positive=nxt > 0.0,
                    within_expected_range=0.0 < nxt <= band,
                )
            )

    events.sort(key=lambda e: (e.ticker, e.trigger_date))
    per_ticker = {
        ticker: _aggregate(
            [e for e in events if e.ticker == ticker], open_by_ticker[ticker]
        )
        for ticker in sorted(open_by_ticker)
    }
    total = _aggregate(events, sum(open_by_ticker.values()))
    return BacktestReport(
        config=config,
        events=tuple(events),
        n_triggers=total.n_triggers,
        open_triggers=total.open_triggers,
        p_positive=total.p_positive,
        p_within_range=total.p_within_range,
        mean_next_return=total.mean_next_return,
        per_ticker=per_ticker,
    )


def outside_band_fraction(returns: ReturnSeries, config: BandConfig) -> float:
    """Fraction of evaluable dates whose |return| exceeds the band."""
    if len(returns) < config.window + 1:
        raise InsufficientData(
            f"need >= {config.window + 1} returns, got {len(returns)}"
        )
    sigmas = _rolling_std(returns.values, config.window)
    outside = evaluable = 0
    for j, sigma in enumerate(sigmas):
        if sigma == 0.0:
            continue
        evaluable += 1
        if abs(float(returns.values[config.window + j])) > config.k * float(sigma):
            outside += 1
    if evaluable == 0:
        raise InsufficientData("no date has a non-degenerate rolling window")
    return outside / evaluable


def events_csv_text(report: BacktestReport) -> str:
    """Event table in the documented CSV layout."""
    lines = ["Ticker,TriggerDate,TriggerReturn,Band,NextDate,NextReturn,RevertedPositive"]
    for e in report.events:
        lines.append(
            f"{e.ticker},{e.trigger_date.isoformat()},{e.trigger_return:.10g},"
            f"{e.band:.10g},{e.next_date.isoformat()},{e.next_return:.10g},"
            f"{str(e.reverted_positive).lower()}"
        )
    return "\n".join(lines) + "\n"


def write_events_csv(report: BacktestReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(events_csv_text(report))
