"""Ingestion, validation, and persistence of daily OHLC price history.

The on-disk format is the classic seven-column Yahoo-style CSV::

    Date,Open,High,Low,Close,Adj Close,Volume
    2012-01-03,409.4000,412.5000,409.0000,411.2300,411.2300,75555200

Line separator is LF. ``parse_csv`` / ``save_series`` round-trip every
valid :class:`PriceSeries` bit-exactly. Remote data comes through
``fetch_remote`` with the transport injected so tests can substitute a
canned one.
"""

from __future__ import annotations

import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Callable, Iterable, TextIO

from .errors import (
    DuplicateDate,
    EmptyInput,
    MalformedHeader,
    MalformedRow,
    TransportError,
)

CSV_HEADER = "Date,Open,High,Low,Close,Adj Close,Volume"

_TICKER_RE = re.compile(r"^[A-Z0-9.^-]{1,10}$")

#: A transport takes a URL and returns the response body text. It must raise
#: :class:`~meanrev.errors.TransportError` on connection or status failure.
Transport = Callable[[str], str]


@dataclass(frozen=True, slots=True)
class OhlcBar:
    """One dated open/high/low/close/volume record."""

    date: date
    open: float
    high: float
    low: float
    close: float
    adj_close: float
    volume: int

    def __post_init__(self):
        for name in ("open", "high", "low", "close", "adj_close"):
            p = getattr(self, name)
            if not (p > 0.0) or p != p or p == float("inf"):
                raise ValueError(f"{name} must be a positive finite price, got {p!r}")
        if self.volume < 0:
            raise ValueError(f"volume must be non-negative, got {self.volume!r}")
        if self.low > self.high:
            raise ValueError(f"low {self.low} exceeds high {self.high}")
        if self.low > min(self.open, self.close):
            raise ValueError(f"low {self.low} exceeds min(open, close)")
        if self.high < max(self.open, self.close):
            raise ValueError(f"high {self.high} below max(open, close)")


@dataclass(frozen=True)
class PriceSeries:
    """Ordered, gap-tolerant daily bar history for one ticker.

    Bars are strictly increasing in date; weekend/holiday gaps are legal.
    Instances are immutable and safe to share across threads.
    """

    ticker: str
    bars: tuple[OhlcBar, ...]

    def __post_init__(self):
        if not _TICKER_RE.match(self.ticker):
            raise ValueError(f"invalid ticker symbol {self.ticker!r}")
        object.__setattr__(self, "bars", tuple(self.bars))
        for prev, cur in zip(self.bars, self.bars[1:]):
            if cur.date == prev.date:
                raise DuplicateDate(f"duplicate date {cur.date.isoformat()}")
            if cur.date < prev.date:
                raise ValueError("bars must be sorted ascending by date")

    def __len__(self) -> int:
        return len(self.bars)

    def dates(self) -> tuple[date, ...]:
        return tuple(b.date for b in self.bars)

    def closes(self, adjusted: bool = False) -> list[float]:
        field = "adj_close" if adjusted else "close"
        return [getattr(b, field) for b in self.bars]


def parse_csv(raw_text: str | TextIO | Iterable[str], ticker: str = "UNKNOWN") -> PriceSeries:
    """Parse seven-column OHLC CSV text into a :class:`PriceSeries`.

    Rows may arrive in any order; the result is sorted ascending by date.
    Violating rows raise, never get silently repaired.

    Raises:
        MalformedHeader: first line is not the exact expected header.
        MalformedRow: bad field count, non-numeric field, bad date, or a bar
            invariant violation (carries the 1-based line number).
        DuplicateDate: the same date appears twice.
        EmptyInput: header but no data rows.
    """
    if hasattr(raw_text, "read"):
        raw_text = raw_text.read()
    if isinstance(raw_text, str):
        lines = raw_text.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in raw_text]

    if not lines or lines[0] != CSV_HEADER:
        got = lines[0] if lines else ""
        raise MalformedHeader(f"expected header {CSV_HEADER!r}, got {got!r}")

    bars: list[OhlcBar] = []
    seen: set[date] = set()
    for line_no, line in enumerate(lines[1:], start=2):
        if line == "":
            continue
        fields = line.split(",")
        if len(fields) != 7:
            raise MalformedRow(line_no, f"expected 7 fields, got {len(fields)}")
        try:
            d = date.fromisoformat(fields[0])
        except ValueError as exc:
            raise MalformedRow(line_no, f"bad date {fields[0]!r}: {exc}") from exc
        prices = []
        for name, field in zip(("Open", "High", "Low", "Close", "Adj Close"), fields[1:6]):
            try:
                prices.append(float(field))
            except ValueError as exc:
                raise MalformedRow(line_no, f"non-numeric {name} field {field!r}") from exc
        try:
            volume = int(fields[6])
        except ValueError as exc:
            raise MalformedRow(line_no, f"non-integer Volume field {fields[6]!r}") from exc
        if d in seen:
            raise DuplicateDate(f"duplicate date {d.isoformat()} at line {line_no}")
        seen.add(d)
        try:
            bars.append(OhlcBar(d, prices[0], prices[1], prices[2], prices[3], prices[4], volume))
        except ValueError as exc:
            raise MalformedRow(line_no, str(exc)) from exc

    if not bars:
        raise EmptyInput("no data rows after header")
    bars.sort(key=lambda b: b.date)
    return PriceSeries(ticker=ticker, bars=tuple(bars))


def load_csv(path: str | Path, ticker: str | None = None) -> PriceSeries:
    """Read a CSV file; the ticker defaults to the uppercased file stem."""
    path = Path(path)
    if ticker is None:
        ticker = path.stem.upper()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_csv(fh, ticker=ticker)


def _format_price(x: float) -> str:
    # Four fractional digits when that is lossless, else the shortest
    # round-tripping representation; parse(save(s)) must reproduce s exactly.
    s = f"{x:.4f}"
    return s if float(s) == x else repr(x)


def to_csv_text(series: PriceSeries) -> str:
    """Render a series in the exact format accepted by :func:`parse_csv`."""
    lines = [CSV_HEADER]
    for b in series.bars:
        lines.append(
            f"{b.date.isoformat()},{_format_price(b.open)},{_format_price(b.high)},"
            f"{_format_price(b.low)},{_format_price(b.close)},"
            f"{_format_price(b.adj_close)},{b.volume}"
        )
    return "\n".join(lines) + "\n"


def save_series(series: PriceSeries, path: str | Path) -> None:
    """Write the series as CSV; an empty series yields a header-only file."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv_text(series))


def _urllib_transport(url: str) -> str:
    try:
        with urllib.request.urlopen(url) as resp:
            return resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        raise TransportError(f"HTTP {exc.code} for {url}", status=exc.code) from exc
    except urllib.error.URLError as exc:
        raise TransportError(f"connection failed for {url}: {exc.reason}") from exc


def fetch_remote(
    ticker: str,
    start: date,
    end: date,
    endpoint: str,
    transport: Transport | None = None,
) -> PriceSeries:
    """Download CSV history for ``ticker`` and clip it to [start, end].

    ``endpoint`` is a URL template using ``{ticker}``, ``{from}`` and ``{to}``
    placeholders (dates substituted in ISO form). The default transport is a
    plain HTTP GET; pass ``transport`` to substitute a canned one in tests.

    Raises TransportError on connection/status failure plus everything
    :func:`parse_csv` raises.
    """
    if "{ticker}" not in endpoint:
        raise ValueError("endpoint template must contain a {ticker} placeholder")
    url = endpoint.format_map(
        {"ticker": ticker, "from": start.isoformat(), "to": end.isoformat()}
    )
    body = (transport or _urllib_transport)(url)
    series = parse_csv(body, ticker=ticker)
    clipped = tuple(b for b in series.bars if start <= b.date <= end)
    return PriceSeries(ticker=ticker, bars=clipped)
