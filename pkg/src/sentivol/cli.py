"""Subcommand CLI: ingest, score, fit-ols, fit-garch, diagnose, simulate,
report, and run (the full pipeline).

Exit codes: 0 success, 1 input error, 2 numerical failure (including a
GARCH fit that did not converge), 3 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import InputError, NumericalError, PipelineStageError, SentivolError
from .garch import GarchParams, fit as garch_fit, qq_data, simulate, standardized_residuals
from .ingest import filter_by_keywords, load_headlines
from .pipeline import (
    build_config,
    panel_from_csv,
    parse_config_file,
    render_report_text,
    run_pipeline,
    score_headline,
)
from .regress import breusch_pagan, design_matrix, durbin_watson, ols_fit, vif
from .report import render_coefficient_table, render_diagnostics_table
from .sentiment import aggregate_daily, category_distribution


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as input errors (exit code 1)."""

    def error(self, message):  # noqa: A003 - argparse API
        raise InputError(message)


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (float, np.floating)) else str(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_market_flags(pairs) -> dict[str, str]:
    market: dict[str, str] = {}
    for pair in pairs or []:
        name, sep, path = pair.partition("=")
        if not sep or not name or not path:
            raise InputError(f"--market expects NAME=PATH, got {pair!r}")
        market[name] = path
    return market


def _config_from_args(args) -> "PipelineConfig":
    file_values = parse_config_file(args.config) if args.config else {}
    overrides = {
        "headlines": args.headlines,
        "headlines_format": args.format,
        "market": _parse_market_flags(args.market) or None,
        "keywords": args.keywords,
        "score_mode": args.score_mode,
        "fill": args.fill,
        "dist": args.dist,
        "mode": args.mode,
        "out": args.out,
        "seed": args.seed,
        "return_series": args.return_series,
    }
    return build_config(file_values, overrides)


def cmd_run(args) -> int:
    config = _config_from_args(args)
    bundle = run_pipeline(config)
    print(f"wrote pipeline outputs to {config.out_dir}")
    if not bundle.garch.converged:
        print("warning: GARCH estimation did not converge", file=sys.stderr)
        return 2
    return 0


def cmd_report(args) -> int:
    config = _config_from_args(args)
    bundle = run_pipeline(config, write=False)
    text = render_report_text(bundle)
    print(text, end="")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if not bundle.garch.converged:
        print("warning: GARCH estimation did not converge", file=sys.stderr)
        return 2
    return 0


def cmd_ingest(args) -> int:
    headlines = load_headlines(args.headlines, format=args.format)
    if args.keywords:
        keywords = [k.strip() for k in args.keywords.split(",") if k.strip()]
        headlines = filter_by_keywords(headlines, keywords)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "headlines.csv")
    rows = []
    for h in headlines:
        logits = h.logits or ("", "", "")
        rows.append([
            h.date.isoformat(), h.source, _csv_quote(h.title), _csv_quote(h.body or ""),
            *[repr(float(v)) if v != "" else "" for v in logits],
        ])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("date,source,title,body,pos,neg,neu\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
    print(f"kept {len(headlines)} headlines -> {path}")
    return 0


def _csv_quote(text: str) -> str:
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def cmd_score(args) -> int:
    headlines = load_headlines(args.headlines, format=args.format)
    mode = (args.score_mode or "prob-diff").replace("-", "_")
    scored = [score_headline(h, mode=mode) for h in headlines]
    daily = aggregate_daily(scored)
    counts = category_distribution(scored)
    os.makedirs(args.out, exist_ok=True)
    _write_csv(
        os.path.join(args.out, "scored.csv"),
        ["date", "label", "score", "p_pos", "p_neg", "p_neu"],
        [(s.date.isoformat(), s.label, s.score, *s.probs) for s in scored],
    )
    _write_csv(
        os.path.join(args.out, "daily_sentiment.csv"),
        ["date", "mean_score", "count"],
        [
            (d.isoformat(), float(m), int(c))
            for d, m, c in zip(daily.dates, daily.mean_scores, daily.counts)
        ],
    )
    _write_csv(
        os.path.join(args.out, "category_distribution.csv"),
        ["label", "count"],
        sorted((label, int(c)) for label, c in counts.items()),
    )
    print(f"scored {len(scored)} headlines over {len(daily)} days -> {args.out}")
    return 0


def _panel_design(panel):
    exog_cols = np.column_stack([panel.sentiment, *[panel.exog[n] for n in panel.exog_names]])
    names = ("Constant", "Sentiment Score", *panel.exog_names)
    return exog_cols, names


def cmd_fit_ols(args) -> int:
    panel = panel_from_csv(args.panel)
    exog_cols, names = _panel_design(panel)
    fit = ols_fit(panel.returns, design_matrix(exog_cols))
    table = render_coefficient_table(fit, names=names)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "ols.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    _write_csv(
        os.path.join(args.out, "ols_residuals.csv"),
        ["date", "residual"],
        [(d.isoformat(), float(e)) for d, e in zip(panel.dates, fit.residuals)],
    )
    print(table, end="")
    return 0


def cmd_diagnose(args) -> int:
    panel = panel_from_csv(args.panel)
    exog_cols, names = _panel_design(panel)
    fit = ols_fit(panel.returns, design_matrix(exog_cols))
    bp = breusch_pagan(fit, design_matrix(exog_cols))
    dw = durbin_watson(fit.residuals)
    vif_values = vif(exog_cols)
    vifs = tuple(zip(names[1:], (float(v) for v in vif_values)))
    table = render_diagnostics_table(bp, dw, vifs)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "diagnostics.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    order = np.argsort(panel.sentiment, kind="stable")
    _write_csv(
        os.path.join(args.out, "residuals_vs_sentiment.csv"),
        ["sentiment", "residual"],
        [(float(panel.sentiment[i]), float(fit.residuals[i])) for i in order],
    )
    print(table, end="")
    return 0


def cmd_fit_garch(args) -> int:
    panel = panel_from_csv(args.panel)
    exog_cols, names = _panel_design(panel)
    dist = {"normal": "normal", "t": "student_t"}[args.dist]
    mode = args.mode.replace("-", "_")
    seeds = tuple(range(args.seed, args.seed + 5))
    fit = garch_fit(panel.returns, exog_cols, distribution=dist, mode=mode, seeds=seeds)
    table = render_coefficient_table(fit, names=names)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "garch.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table)
    _write_csv(
        os.path.join(args.out, "variance_path.csv"),
        ["date", "sigma2"],
        [(d.isoformat(), float(v)) for d, v in zip(panel.dates, fit.variance_path)],
    )
    z = standardized_residuals(fit, panel.returns, exog_cols)
    _write_csv(
        os.path.join(args.out, "standardized_residuals.csv"),
        ["date", "z"],
        [(d.isoformat(), float(v)) for d, v in zip(panel.dates, z)],
    )
    _write_csv(os.path.join(args.out, "qq.csv"), ["theoretical", "empirical"], qq_data(z))
    print(table, end="")
    if not fit.converged:
        print("warning: GARCH estimation did not converge", file=sys.stderr)
        return 2
    return 0


def cmd_simulate(args) -> int:
    dist = {"normal": "normal", "t": "student_t"}[args.dist]
    params = GarchParams(
        mu=args.mu,
        betas=np.empty(0),
        alpha0=args.alpha0,
        alpha1=args.alpha1,
        beta1=args.beta1,
        nu=args.nu,
    )
    y, sigma2 = simulate(params, T=args.T, seed=args.seed, distribution=dist)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "simulated.csv")
    _write_csv(path, ["t", "y", "sigma2"], [(t + 1, float(y[t]), float(sigma2[t])) for t in range(args.T)])
    print(f"simulated {args.T} observations -> {path}")
    return 0


def _add_pipeline_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="flat KEY = VALUE config file; flags override it")
    sub.add_argument("--headlines", help="headline CSV/JSONL path")
    sub.add_argument("--format", choices=["csv", "jsonl"], help="headline file format")
    sub.add_argument("--market", action="append", metavar="NAME=PATH",
                     help="market series CSV (repeatable)")
    sub.add_argument("--keywords", help="comma-separated keyword list")
    sub.add_argument("--score-mode", dest="score_mode", choices=["prob-diff", "logit-diff"])
    sub.add_argument("--fill", choices=["spline", "drop"])
    sub.add_argument("--dist", choices=["normal", "t"])
    sub.add_argument("--mode", choices=["joint", "two-step"])
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--seed", type=int, help="base seed for the multi-start list")
    sub.add_argument("--return-series", dest="return_series",
                     help="market series name holding prices for log returns")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sentivol", description=__doc__)
    parser.add_argument("--version", action="version", version=f"sentivol {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("run", parents=[], help="full pipeline: ingest through report")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_run)

    p = subs.add_parser("report", help="run the pipeline and print the rendered report")
    _add_pipeline_flags(p)
    p.set_defaults(func=cmd_report)

    p = subs.add_parser("ingest", help="load, optionally keyword-filter, and re-emit headlines")
    p.add_argument("--headlines", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--keywords", help="comma-separated keyword list (no filtering when absent)")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_ingest)

    p = subs.add_parser("score", help="score headlines and aggregate daily sentiment")
    p.add_argument("--headlines", required=True)
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("--score-mode", dest="score_mode", choices=["prob-diff", "logit-diff"],
                   default="prob-diff")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_score)

    p = subs.add_parser("fit-ols", help="OLS mean equation on an aligned panel CSV")
    p.add_argument("--panel", required=True, help="panel CSV (date,returns,sentiment,...)")
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_fit_ols)

    p = subs.add_parser("diagnose", help="Breusch-Pagan, Durbin-Watson, and VIF on a panel CSV")
    p.add_argument("--panel", required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_diagnose)

    p = subs.add_parser("fit-garch", help="GARCH(1,1) fit on an aligned panel CSV")
    p.add_argument("--panel", required=True)
    p.add_argument("--dist", choices=["normal", "t"], default="t")
    p.add_argument("--mode", choices=["joint", "two-step"], default="joint")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_fit_garch)

    p = subs.add_parser("simulate", help="simulate a GARCH(1,1) path")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--alpha1", type=float, required=True)
    p.add_argument("--beta1", type=float, required=True)
    p.add_argument("--nu", type=float, help="Student-t tail dof (required for --dist t)")
    p.add_argument("--dist", choices=["normal", "t"], default="normal")
    p.add_argument("--T", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="out")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except PipelineStageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc.cause, InputError):
            return 1
        if isinstance(exc.cause, NumericalError):
            return 2
        return 3
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SentivolError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
