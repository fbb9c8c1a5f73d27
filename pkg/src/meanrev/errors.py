"""Exception hierarchy shared by all meanrev modules.

Every library-raised error derives from :class:`MeanrevError` so callers
(and the CLI) can map "data or statistical problem" to one handler. Class
names double as machine-readable reason codes in screener output.
"""

from __future__ import annotations


class MeanrevError(Exception):
    """Base class for all errors raised by this package."""


# --- market data -----------------------------------------------------------

class MalformedHeader(MeanrevError):
    """CSV header line does not match the required seven-column layout."""


class MalformedRow(MeanrevError):
    """A CSV data row failed to parse or violated a bar invariant.

    Carries the 1-based line number of the offending row.
    """

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateDate(MeanrevError):
    """Two rows carry the same date."""


class EmptyInput(MeanrevError):
    """CSV contained a header but zero data rows."""


class TransportError(MeanrevError):
    """Remote fetch failed; ``status`` holds the HTTP status if one exists."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


# --- statistics ------------------------------------------------------------

class InsufficientData(MeanrevError):
    """Fewer observations than the operation requires."""


class LengthMismatch(MeanrevError):
    """Paired samples have different lengths."""


class ZeroVariance(MeanrevError):
    """A sample is constant where positive dispersion is required."""


class NoOverlap(MeanrevError):
    """Two dated series share no dates."""


# --- normality testing -----------------------------------------------------

class SampleTooSmall(MeanrevError):
    """Shapiro-Wilk needs at least 3 observations."""


class SampleTooLarge(MeanrevError):
    """Shapiro-Wilk approximation is only valid up to 5000 observations."""


class DegenerateSample(MeanrevError):
    """All observations equal: the test statistic's denominator is zero."""


# --- signals ---------------------------------------------------------------

class UnknownDate(MeanrevError):
    """Requested date is not present in the series."""


class InsufficientHistory(MeanrevError):
    """Not enough points before the requested date."""


# --- screening -------------------------------------------------------------

class EmptyUniverse(MeanrevError):
    """Screen invoked with no tickers."""
