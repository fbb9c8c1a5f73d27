"""Daily-return series derived from consecutive closing prices.

Two conventions are supported:

* ``ratio``  -- Close_t / Close_{t-1}, the literal close-over-close ratio;
* ``simple`` -- Close_t / Close_{t-1} - 1, the mean-zero convention that
  sigma-band arithmetic assumes. This is the default.

Returns are computed between consecutive bars (trading days), not calendar
days, and each point is dated by the later bar so "today's return" is
unambiguous downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from .errors import InsufficientData
from .market_data import PriceSeries

MODES = ("simple", "ratio")


@dataclass(frozen=True)
class ReturnSeries:
    """Dated daily returns for one ticker; immutable after construction."""

    ticker: str
    dates: tuple[date, ...]
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)  # private copy
        if values.ndim != 1 or len(values) != len(self.dates):
            raise ValueError("dates and values must be 1-d and equal length")
        if np.any(values <= -1.0):
            raise ValueError("returns must be > -1 (prices are positive)")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if cur <= prev:
                raise ValueError("dates must be strictly increasing")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dates", tuple(self.dates))

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def points(self) -> list[tuple[date, float]]:
        return list(zip(self.dates, (float(v) for v in self.values)))

    def index_of(self, d: date) -> int | None:
        """Position of ``d`` in the series, or None if absent."""
        try:
            return self.dates.index(d)
        except ValueError:
            return None


def daily_returns(series: PriceSeries, mode: str = "simple", adjusted: bool = False) -> ReturnSeries:
    """Transform a price series into its daily-return series.

    ``adjusted`` selects the Adj Close column instead of Close as the input
    to the ratio. Needs at least two bars.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if len(series) < 2:
        raise InsufficientData(f"need >= 2 bars to compute returns, got {len(series)}")
    closes = np.asarray(series.closes(adjusted=adjusted), dtype=np.float64)
    ratios = closes[1:] / closes[:-1]
    values = ratios if mode == "ratio" else ratios - 1.0
    return ReturnSeries(ticker=series.ticker, dates=series.dates()[1:], values=values)


def returns_csv_text(returns: ReturnSeries) -> str:
    """``Date,Return`` CSV with returns at 10 significant digits."""
    lines = ["Date,Return"]
    for d, v in zip(returns.dates, returns.values):
        lines.append(f"{d.isoformat()},{v:.10g}")
    return "\n".join(lines) + "\n"


def write_returns_csv(returns: ReturnSeries, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(returns_csv_text(returns))
