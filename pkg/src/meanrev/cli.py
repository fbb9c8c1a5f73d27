"""Command-line entry point: ``meanrev <command> [options]``.

Commands: ``fetch``, ``analyze``, ``correlate``, ``backtest``, ``screen``,
``config``. Every command that reports does so as a versioned JSON envelope
on stdout (or to ``--out``); ``--deterministic`` pins the envelope
timestamp so identical inputs produce byte-identical output.

Every flag can be preset through an environment variable named
``MEANREV_<FLAG>`` (dashes become underscores); explicit flags win.

Exit codes: 0 success, 1 usage error, 2 data or statistical error.
"""

from __future__ import annotations

import argparse
import os
import sys
from datetime import date
from pathlib import Path

from . import report
from .backtest import run_backtest, write_events_csv
from .errors import EmptyUniverse, MeanrevError
from .market_data import Transport, fetch_remote, load_csv, save_series
from .normality import density_histogram, histogram_breaks, qq_plot_data, shapiro_wilk
from .returns import daily_returns
from .screener import (
    DEFAULT_MIN_HISTORY,
    DEFAULT_STALENESS,
    read_universe_manifest,
    screen,
)
from .signals import BandConfig, evaluate_signal, rolling_sigma
from .stats import align_by_date, correlation

ENV_PREFIX = "MEANREV_"

_TRUTHY = {"1", "true", "yes", "on"}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that honours the exit-code contract (1 = usage)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _env(flag: str, fallback, cast=str):
    raw = os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"))
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise _UsageError(f"bad value {raw!r} for {ENV_PREFIX}{flag.upper()}: {exc}") from exc


def _env_flag(flag: str) -> bool:
    raw = os.environ.get(ENV_PREFIX + flag.upper().replace("-", "_"))
    return raw is not None and raw.strip().lower() in _TRUTHY


def _add_band_flags(p: argparse.ArgumentParser, with_alpha: bool = False):
    p.add_argument("--window", type=int, default=_env("window", 252, int),
                   help="rolling window in trading days (default 252)")
    p.add_argument("--k", type=float, default=_env("k", 2.0, float),
                   help="band multiplier (default 2.0)")
    p.add_argument("--mode", choices=["simple", "ratio"],
                   default=_env("mode", "simple"),
                   help="daily-return convention (default simple)")
    if with_alpha:
        p.add_argument("--alpha", type=float, default=_env("alpha", 0.05, float),
                       help="normality significance level (default 0.05)")


def _add_report_flags(p: argparse.ArgumentParser):
    p.add_argument("--deterministic", action="store_true",
                   default=_env_flag("deterministic"),
                   help="pin the report timestamp for byte-stable output")
    p.add_argument("--out", type=Path, default=_env("out", None, Path),
                   help="write the JSON envelope here instead of stdout")


def build_parser(transport: Transport | None = None) -> _Parser:
    parser = _Parser(prog="meanrev",
                     description="Daily-return band signals, normality checks, "
                                 "backtesting, and screening on OHLC data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fetch", help="download OHLC history to a CSV file")
    p.add_argument("ticker")
    p.add_argument("start", type=date.fromisoformat, metavar="from")
    p.add_argument("end", type=date.fromisoformat, metavar="to")
    p.add_argument("out_path", type=Path)
    p.add_argument("--endpoint", default=_env("endpoint", None), required=False,
                   help="URL template with {ticker}, {from}, {to} placeholders")
    p.set_defaults(handler=_cmd_fetch)

    p = sub.add_parser("analyze", help="normality report plus the latest band verdict")
    p.add_argument("csv_path", type=Path)
    _add_band_flags(p, with_alpha=True)
    p.add_argument("--adjusted", action="store_true", default=_env_flag("adjusted"),
                   help="compute returns from Adj Close instead of Close")
    p.add_argument("--bin-breaks", action="store_true", default=_env_flag("bin-breaks"),
                   help="fidelity mode: test histogram bin breaks, not the sample")
    p.add_argument("--emit-plots", action="store_true", default=_env_flag("emit-plots"),
                   help="also write density/QQ/band CSVs for external plotting")
    p.add_argument("--plots-dir", type=Path, default=_env("plots-dir", None, Path),
                   help="directory for --emit-plots output (default: next to input)")
    _add_report_flags(p)
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("correlate", help="correlation of two tickers' daily returns")
    p.add_argument("csv_a", type=Path)
    p.add_argument("csv_b", type=Path)
    p.add_argument("--mode", choices=["simple", "ratio"],
                   default=_env("mode", "simple"))
    _add_report_flags(p)
    p.set_defaults(handler=_cmd_correlate)

    p = sub.add_parser("backtest", help="replay the band rule over CSV histories")
    p.add_argument("csv_paths", type=Path, nargs="+")
    _add_band_flags(p)
    p.add_argument("--events-csv", type=Path, default=_env("events-csv", None, Path),
                   help="also write the trigger-event table here")
    _add_report_flags(p)
    p.set_defaults(handler=_cmd_backtest)

    p = sub.add_parser("screen", help="scan a ticker universe for fresh band breaches")
    p.add_argument("manifest", type=Path, help="one ticker per line, '#' comments")
    p.add_argument("data_dir", type=Path, help="directory holding <TICKER>.csv files")
    _add_band_flags(p, with_alpha=True)
    p.add_argument("--as-of", type=date.fromisoformat,
                   default=_env("as-of", None, date.fromisoformat),
                   help="evaluation date (default: newest bar in the universe)")
    p.add_argument("--min-history", type=int,
                   default=_env("min-history", DEFAULT_MIN_HISTORY, int),
                   help=f"minimum bars per ticker (default {DEFAULT_MIN_HISTORY})")
    p.add_argument("--staleness-days", type=int,
                   default=_env("staleness-days", DEFAULT_STALENESS, int),
                   help=f"trading days behind as-of before a ticker is stale "
                        f"(default {DEFAULT_STALENESS})")
    p.add_argument("--full-history-normality", action="store_true",
                   default=_env_flag("full-history-normality"),
                   help="test normality on the full history, not the band window")
    _add_report_flags(p)
    p.set_defaults(handler=_cmd_screen)

    p = sub.add_parser("config", help="print the statistical defaults")
    _add_report_flags(p)
    p.set_defaults(handler=_cmd_config)

    return parser


def _stamp(args) -> str:
    return report.EPOCH_TIMESTAMP if args.deterministic else report.utc_now_stamp()


def _emit(args, document: dict) -> None:
    text = report.to_canonical_json(document)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_fetch(args, transport) -> int:
    if not args.endpoint:
        raise _UsageError("fetch requires --endpoint (or MEANREV_ENDPOINT)")
    series = fetch_remote(args.ticker.upper(), args.start, args.end,
                          args.endpoint, transport)
    save_series(series, args.out_path)
    print(f"wrote {len(series)} bars to {args.out_path}", file=sys.stderr)
    return 0


def _write_xy_csv(path: Path, rows) -> None:
    lines = ["x,y"] + [f"{x:.10g},{y:.10g}" for x, y in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _cmd_analyze(args, transport) -> int:
    config = BandConfig(window=args.window, k=args.k, mode=args.mode)
    series = load_csv(args.csv_path)
    returns = daily_returns(series, mode=config.mode, adjusted=args.adjusted)
    sigmas = rolling_sigma(returns, config)  # validates window feasibility
    latest = returns.dates[-1]
    decision = evaluate_signal(returns, latest, config)

    window_sample = returns.values[len(returns) - 1 - config.window : len(returns) - 1]
    if args.bin_breaks:
        normality = shapiro_wilk(histogram_breaks(window_sample), args.alpha)
        sample_kind = "bin-breaks"
    else:
        normality = shapiro_wilk(window_sample, args.alpha)
        sample_kind = "rolling-window"

    payload = {
        "ticker": series.ticker,
        "mode": config.mode,
        "normality": report.normality_dict(normality, sample_kind),
        "signal": report.signal_dict(decision),
    }
    _emit(args, report.envelope("analyze", payload, _stamp(args)))

    if args.emit_plots:
        out_dir = args.plots_dir if args.plots_dir is not None else args.csv_path.parent
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = args.csv_path.stem
        _write_xy_csv(out_dir / f"{stem}_density.csv", density_histogram(returns.values))
        _write_xy_csv(out_dir / f"{stem}_qq.csv", qq_plot_data(returns.values).points)
        lines = ["Date,Sigma,UpperBand,LowerBand"]
        for d, s in sigmas:
            b = config.k * s
            lines.append(f"{d.isoformat()},{s:.10g},{b:.10g},{-b:.10g}")
        (out_dir / f"{stem}_bands.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return 0


def _cmd_correlate(args, transport) -> int:
    series_a = load_csv(args.csv_a)
    series_b = load_csv(args.csv_b)
    ra = daily_returns(series_a, mode=args.mode)
    rb = daily_returns(series_b, mode=args.mode)
    xs, ys = align_by_date(ra, rb)
    payload = {
        "ticker_a": series_a.ticker,
        "ticker_b": series_b.ticker,
        "mode": args.mode,
        "n_aligned": int(len(xs)),
        "correlation": correlation(xs, ys),
    }
    _emit(args, report.envelope("correlate", payload, _stamp(args)))
    return 0


def _cmd_backtest(args, transport) -> int:
    config = BandConfig(window=args.window, k=args.k, mode=args.mode)
    serieses = [daily_returns(load_csv(p), mode=config.mode) for p in args.csv_paths]
    result = run_backtest(serieses, config)
    _emit(args, report.envelope("backtest", report.backtest_dict(result), _stamp(args)))
    if args.events_csv is not None:
        write_events_csv(result, args.events_csv)
    return 0


def _format_screen_table(result) -> str:
    if not result.candidates:
        return "(no candidates)\n"
    header = f"{'TICKER':<10} {'RETURN':>10} {'BAND':>10} {'RATIO':>7} {'P-VALUE':>9} {'FORECAST':>10}"
    rows = [header, "-" * len(header)]
    for c in result.candidates:
        rows.append(
            f"{c.ticker:<10} {c.today_return:>10.4%} {c.band:>10.4%} "
            f"{c.breach_ratio:>7.2f} {c.normality.p_value:>9.4f} "
            f"{c.momentum.r1_forecast:>10.4%}"
        )
    return "\n".join(rows) + "\n"


def _cmd_screen(args, transport) -> int:
    tickers = read_universe_manifest(args.manifest)
    if not tickers:
        raise EmptyUniverse(f"manifest {args.manifest} lists no tickers")
    config = BandConfig(window=args.window, k=args.k, mode=args.mode)
    universe = [load_csv(args.data_dir / f"{t}.csv", ticker=t) for t in tickers]
    result = screen(
        universe, config, args.alpha,
        as_of=args.as_of,
        min_history=args.min_history,
        staleness_days=args.staleness_days,
        full_history_normality=args.full_history_normality,
    )
    sample_kind = "full-history" if args.full_history_normality else "rolling-window"
    payload = report.screen_dict(result, config, args.alpha, args.min_history,
                                 args.staleness_days, sample_kind)
    _emit(args, report.envelope("screen", payload, _stamp(args)))
    sys.stdout.write(_format_screen_table(result))
    return 0


def _cmd_config(args, transport) -> int:
    payload = {
        "window": 252,
        "k": 2.0,
        "alpha": 0.05,
        "mode": "simple",
        "min_history": DEFAULT_MIN_HISTORY,
        "staleness_days": DEFAULT_STALENESS,
        "env_prefix": ENV_PREFIX,
    }
    _emit(args, report.envelope("config", payload, _stamp(args)))
    return 0


def main(argv: list[str] | None = None, transport: Transport | None = None) -> int:
    parser = build_parser(transport)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.handler(args, transport)
    except (_UsageError, ValueError) as exc:
        print(f"meanrev: error: {exc}", file=sys.stderr)
        return 1
    except EmptyUniverse as exc:
        print(f"meanrev: error: EmptyUniverse: {exc}", file=sys.stderr)
        return 1
    except MeanrevError as exc:
        print(f"meanrev: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"meanrev: error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
