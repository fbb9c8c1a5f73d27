"""Versioned JSON report envelopes and deterministic serialization.

Every CLI command wraps its payload in the same envelope::

    {"schema_version": "...", "command": "...", "generated_at": "...",
     "payload": {...}}

Serialization is canonical: sorted keys, two-space indent, no NaN/Inf,
trailing newline. Identical inputs therefore produce byte-identical
documents, which is what the golden-file tests pin. The machine-readable
schema ships at ``meanrev/schemas/report.schema.json``.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from typing import Any

from .backtest import BacktestReport, TickerBreakdown, TriggerEvent
from .normality import NormalityReport
from .screener import ScreenResult
from .signals import BandConfig, MomentumEstimate, SignalDecision

SCHEMA_VERSION = "1.0.0"

EPOCH_TIMESTAMP = "1970-01-01T00:00:00Z"


def utc_now_stamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def envelope(command: str, payload: dict[str, Any], generated_at: str) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "generated_at": generated_at,
        "payload": payload,
    }


def to_canonical_json(document: dict[str, Any]) -> str:
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False) + "\n"


def band_config_dict(config: BandConfig) -> dict[str, Any]:
    return {
        "window": config.window,
        "k": config.k,
        "mode": config.mode,
        "short_on_positive": config.short_on_positive,
    }


def normality_dict(report: NormalityReport, sample_kind: str) -> dict[str, Any]:
    # The coefficient vector is reproducible from n alone, so it stays out
    # of the report.
    return {
        "n": report.n,
        "w": report.w,
        "p_value": report.p_value,
        "alpha": report.alpha,
        "reject_normality": report.reject_normality,
        "sample": sample_kind,
    }


def momentum_dict(m: MomentumEstimate) -> dict[str, Any]:
    return {
        "slope_m": m.slope_m,
        "r0": m.r0,
        "r1_forecast": m.r1_forecast,
        "t_span": m.t_span,
    }


def signal_dict(d: SignalDecision) -> dict[str, Any]:
    out: dict[str, Any] = {
        "date": d.date.isoformat(),
        "today_return": d.today_return,
        "sigma": d.sigma,
        "band": d.band,
        "triggered": d.triggered,
        "direction": d.direction,
        "momentum": momentum_dict(d.momentum),
    }
    if d.expected_range is not None:
        out["expected_range"] = [d.expected_range[0], d.expected_range[1]]
    return out


def _breakdown_dict(b: TickerBreakdown) -> dict[str, Any]:
    out: dict[str, Any] = {"n_triggers": b.n_triggers, "open_triggers": b.open_triggers}
    if b.n_triggers > 0:
        out["p_positive"] = b.p_positive
        out["p_within_range"] = b.p_within_range
        out["mean_next_return"] = b.mean_next_return
    return out


def _event_dict(e: TriggerEvent) -> dict[str, Any]:
    return {
        "ticker": e.ticker,
        "trigger_date": e.trigger_date.isoformat(),
        "trigger_return": e.trigger_return,
        "band": e.band,
        "next_date": e.next_date.isoformat(),
        "next_return": e.next_return,
        "reverted_positive": e.reverted_positive,
        "within_expected_range": e.within_expected_range,
    }


def backtest_dict(report: BacktestReport) -> dict[str, Any]:
    out: dict[str, Any] = {
        "config": band_config_dict(report.config),
        "n_triggers": report.n_triggers,
        "open_triggers": report.open_triggers,
        "per_ticker": {t: _breakdown_dict(b) for t, b in report.per_ticker.items()},
        "events": [_event_dict(e) for e in report.events],
    }
    if report.n_triggers > 0:
        out["p_positive"] = report.p_positive
        out["p_within_range"] = report.p_within_range
        out["mean_next_return"] = report.mean_next_return
    return out


def screen_dict(result: ScreenResult, config: BandConfig, alpha: float,
                min_history: int, staleness_days: int,
                sample_kind: str = "rolling-window") -> dict[str, Any]:
    return {
        "as_of": result.as_of.isoformat(),
        "config": band_config_dict(config),
        "alpha": alpha,
        "min_history": min_history,
        "staleness_days": staleness_days,
        "candidates": [
            {
                "ticker": c.ticker,
                "date": c.as_of.isoformat(),
                "today_return": c.today_return,
                "band": c.band,
                "breach_ratio": c.breach_ratio,
                "normality": normality_dict(c.normality, sample_kind),
                "momentum": momentum_dict(c.momentum),
            }
            for c in result.candidates
        ],
        "skipped": [
            {"ticker": s.ticker, "reason": s.reason, "detail": s.detail}
            for s in result.skipped
        ],
    }
