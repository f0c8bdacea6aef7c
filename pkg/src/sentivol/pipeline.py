"""End-to-end orchestration: ingest -> score -> align -> OLS+diagnostics
-> GARCH -> residual diagnostics -> rendered report and figure CSVs.

A run is a pure function of (input files, config): no wall-clock state
enters any output, so identical runs produce byte-identical artifacts.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import InputError, PipelineStageError, SentivolError
from .garch import DEFAULT_MULTISTART_SEEDS, fit as garch_fit, qq_data, standardized_residuals
from .ingest import AlignedPanel, Headline, align_panel, filter_by_keywords, load_headlines, load_market_series, normalize_text
from .regress import breusch_pagan, design_matrix, durbin_watson, ols_fit, vif
from .report import (
    ReportBundle,
    export_figure_data,
    render_coefficient_table,
    render_diagnostics_table,
    render_summary_table,
)
from .sentiment import ScoredHeadline, aggregate_daily, category_distribution, lexicon_score
from .timeseries import describe, log_returns

DEFAULT_KEYWORDS = ("war", "russia", "ukraine")


@dataclass(frozen=True)
class PipelineConfig:
    """Resolved configuration for one pipeline run; flags win over file values."""

    headlines_path: str
    market_paths: dict[str, str]
    return_series: str = "SP500"
    headlines_format: str = "csv"
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    score_mode: str = "prob_diff"
    fill: str = "spline"
    distribution: str = "student_t"
    mode: str = "joint"
    out_dir: str = "out"
    seeds: tuple[int, ...] = DEFAULT_MULTISTART_SEEDS
    date_column: str = "date"
    value_column: str = "value"

    def validate(self) -> None:
        if not self.headlines_path:
            raise InputError("config needs a headlines path")
        if not self.market_paths:
            raise InputError("config needs at least one market series path")
        if self.return_series not in self.market_paths:
            raise InputError(
                f"return series {self.return_series!r} has no market path "
                f"(have: {sorted(self.market_paths)})"
            )
        if not self.out_dir:
            raise InputError("config needs an output directory")
        if self.score_mode not in ("prob_diff", "logit_diff"):
            raise InputError(f"unknown score_mode {self.score_mode!r}")
        if self.fill not in ("spline", "drop"):
            raise InputError(f"unknown fill mode {self.fill!r}")
        if self.distribution not in ("normal", "student_t"):
            raise InputError(f"unknown distribution {self.distribution!r}")
        if self.mode not in ("joint", "two_step"):
            raise InputError(f"unknown estimation mode {self.mode!r}")
        if not self.keywords:
            raise InputError("config needs a nonempty keyword list")


def parse_config_file(path: str) -> dict:
    """Flat KEY = VALUE lines; '#' starts a comment; market.NAME keys map series paths."""
    if not os.path.isfile(path):
        raise InputError(f"config file not found: {path}")
    values: dict = {}
    market: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_num, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{line_num}: expected KEY = VALUE, got {line!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key.startswith("market."):
                market[key[len("market."):]] = value
            else:
                values[key] = value
    if market:
        values["market"] = market
    return values


def _normalize_distribution(value: str) -> str:
    alias = {"t": "student_t", "student-t": "student_t", "student_t": "student_t", "normal": "normal"}
    if value not in alias:
        raise InputError(f"unknown distribution {value!r} (expected normal or t)")
    return alias[value]


def _normalize_mode(value: str) -> str:
    alias = {"joint": "joint", "two-step": "two_step", "two_step": "two_step"}
    if value not in alias:
        raise InputError(f"unknown estimation mode {value!r} (expected joint or two-step)")
    return alias[value]


def build_config(file_values: dict | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Merge config-file values with CLI overrides (overrides win)."""
    merged: dict = dict(file_values or {})
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "market":
            market = dict(merged.get("market") or {})
            market.update(value)
            merged["market"] = market
        else:
            merged[key] = value

    def _split(raw) -> tuple[str, ...]:
        if isinstance(raw, (tuple, list)):
            return tuple(raw)
        return tuple(part.strip() for part in str(raw).split(",") if part.strip())

    seeds: tuple[int, ...] = DEFAULT_MULTISTART_SEEDS
    if merged.get("seeds") is not None:
        seeds = tuple(int(s) for s in _split(merged["seeds"]))
    elif merged.get("seed") is not None:
        base = int(merged["seed"])
        seeds = tuple(range(base, base + len(DEFAULT_MULTISTART_SEEDS)))

    return PipelineConfig(
        headlines_path=str(merged.get("headlines", "")),
        market_paths=dict(merged.get("market") or {}),
        return_series=str(merged.get("return_series", "SP500")),
        headlines_format=str(merged.get("headlines_format", "csv")),
        keywords=_split(merged["keywords"]) if merged.get("keywords") else DEFAULT_KEYWORDS,
        score_mode=str(merged.get("score_mode", "prob_diff")).replace("-", "_"),
        fill=str(merged.get("fill", "spline")),
        distribution=_normalize_distribution(str(merged.get("dist", "t"))),
        mode=_normalize_mode(str(merged.get("mode", "joint"))),
        out_dir=str(merged.get("out", "out")),
        seeds=seeds,
        date_column=str(merged.get("date_column", "date")),
        value_column=str(merged.get("value_column", "value")),
    )


def score_headline(headline: Headline, mode: str = "prob_diff") -> ScoredHeadline:
    """Score from the headline's own logits, or the toy lexicon when absent."""
    logits = headline.logits
    if logits is None:
        text = headline.title if headline.body is None else f"{headline.title} {headline.body}"
        logits = lexicon_score(normalize_text(text))
    return ScoredHeadline.from_logits(headline.date, logits, mode=mode)


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SentivolError as exc:
        raise PipelineStageError(name, exc) from exc


def run_pipeline(config: PipelineConfig, write: bool = True) -> ReportBundle:
    """Execute the full pipeline; writes all artifacts under config.out_dir.

    Deterministic given (input files, config): metadata records the data's
    date span, never wall-clock time.
    """

    def _ingest():
        config.validate()
        headlines = load_headlines(config.headlines_path, format=config.headlines_format)
        kept = filter_by_keywords(headlines, list(config.keywords))
        if not kept:
            raise InputError("no headlines match the keyword list")
        markets = {
            name: load_market_series(path, name, config.date_column, config.value_column)
            for name, path in config.market_paths.items()
        }
        return headlines, kept, markets

    headlines, kept, markets = _stage("ingest", _ingest)

    def _score():
        scored = [score_headline(h, mode=config.score_mode) for h in kept]
        return scored, aggregate_daily(scored), category_distribution(scored)

    scored, daily, dist_counts = _stage("score", _score)

    def _align():
        returns = log_returns(markets[config.return_series])
        exog = [markets[name] for name in config.market_paths if name != config.return_series]
        return align_panel(returns, daily, exog, fill=config.fill)

    panel = _stage("align", _align)

    regressor_names = ("Constant", "Sentiment Score", *panel.exog_names)
    exog_cols = np.column_stack([panel.sentiment, *[panel.exog[n] for n in panel.exog_names]])
    design = design_matrix(exog_cols)

    ols = _stage("ols", ols_fit, panel.returns, design)

    def _diagnose():
        bp = breusch_pagan(ols, design)
        dw = durbin_watson(ols.residuals)
        vif_values = vif(exog_cols)
        names = ("Sentiment Score", *panel.exog_names)
        return bp, dw, tuple(zip(names, (float(v) for v in vif_values)))

    bp, dw, vifs = _stage("diagnose", _diagnose)

    garch = _stage(
        "garch", garch_fit, panel.returns, exog_cols,
        distribution=config.distribution, mode=config.mode, seeds=config.seeds,
    )

    def _residual_diagnostics():
        z = standardized_residuals(garch, panel.returns, exog_cols)
        return z, qq_data(z, reference="normal")

    zresid, qq = _stage("diagnose", _residual_diagnostics)

    def _summarize():
        summary = {"Returns": describe(panel.returns), "Sentiment Score": describe(panel.sentiment)}
        for name in panel.exog_names:
            summary[name] = describe(panel.exog[name])
        return summary

    summary = _stage("describe", _summarize)

    def _assemble():
        items = sorted(((d, c) for d, c in zip(daily.dates, daily.counts)))
        order = np.argsort(panel.sentiment, kind="stable")
        figures = {
            "items_per_day": [(d.isoformat(), int(c)) for d, c in items],
            "daily_sentiment": [
                (d.isoformat(), float(s)) for d, s in zip(daily.dates, daily.mean_scores)
            ],
            "category_distribution": sorted(
                (label, int(count)) for label, count in dist_counts.items()
            ),
            "residuals_vs_sentiment": [
                (float(panel.sentiment[i]), float(ols.residuals[i])) for i in order
            ],
            "qq": [(float(t), float(e)) for t, e in qq],
        }

        extra_footer = []
        if config.mode == "two_step":
            extra_footer = [
                ("Adjusted R-squared (OLS mean stage)", ols.adj_r2),
                ("F-statistic (OLS mean stage)", ols.f_statistic),
            ]
        tables = {
            "ols": render_coefficient_table(ols, names=regressor_names),
            "garch": render_coefficient_table(garch, names=regressor_names, extra_footer=extra_footer),
            "diagnostics": render_diagnostics_table(bp, dw, vifs),
            "summary": render_summary_table(summary),
        }

        observed = {name: set(markets[name].dates) for name in panel.exog_names}
        fill_counts = {
            name: int(sum(1 for d in panel.dates if d not in observed[name]))
            for name in panel.exog_names
        }
        config_echo = dataclasses.asdict(config)
        config_echo["keywords"] = list(config.keywords)
        config_echo["seeds"] = list(config.seeds)
        metadata = {
            "version": __version__,
            "config": config_echo,
            "panel_start": panel.dates[0].isoformat(),
            "panel_end": panel.dates[-1].isoformat(),
            "n_obs": len(panel),
            "headlines_loaded": len(headlines),
            "headlines_kept": len(kept),
            "exog_fill_counts": fill_counts,
            "garch_converged": garch.converged,
        }
        return ReportBundle(
            config_echo=config_echo,
            panel=panel,
            daily=daily,
            distribution_counts=dist_counts,
            ols=ols,
            regressor_names=regressor_names,
            bp=bp,
            dw=dw,
            vifs=vifs,
            garch=garch,
            summary=summary,
            figures=figures,
            tables=tables,
            metadata=metadata,
        )

    bundle = _stage("report", _assemble)

    if write:
        _stage("write", write_outputs, bundle, config.out_dir, zresid)
    return bundle


def render_report_text(bundle: ReportBundle) -> str:
    sections = [
        ("Mean equation (OLS)", bundle.tables["ols"]),
        ("Mean-equation diagnostics", bundle.tables["diagnostics"]),
        (f"GARCH(1,1), {bundle.garch.distribution} innovations", bundle.tables["garch"]),
        ("Summary statistics", bundle.tables["summary"]),
    ]
    parts = ["Sentiment-to-volatility pipeline report", "=" * 39, ""]
    for title, table in sections:
        parts += [title, "-" * len(title), table, ""]
    return "\n".join(parts)


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for value in row:
            if isinstance(value, (float, np.floating)):
                cells.append(repr(float(value)))
            else:
                cells.append(str(value))
        lines.append(",".join(cells))
    _write_text(path, "\n".join(lines) + "\n")


def panel_to_csv(panel: AlignedPanel, path: str) -> None:
    header = ["date", "returns", "sentiment", *panel.exog_names]
    rows = []
    for i, d in enumerate(panel.dates):
        rows.append([
            d.isoformat(),
            float(panel.returns[i]),
            float(panel.sentiment[i]),
            *[float(panel.exog[n][i]) for n in panel.exog_names],
        ])
    _write_csv(path, header, rows)


def panel_from_csv(path: str) -> AlignedPanel:
    """Read an aligned panel written by panel_to_csv (date,returns,sentiment,...)."""
    import csv as _csv
    import datetime as _dt

    if not os.path.isfile(path):
        raise InputError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"empty file: {path}")
        required = ("date", "returns", "sentiment")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise InputError(f"{path}: missing column(s) {missing}")
        exog_names = [c for c in reader.fieldnames if c not in required]
        dates, returns, sentiment = [], [], []
        exog: dict[str, list[float]] = {name: [] for name in exog_names}
        for row in reader:
            line = reader.line_num
            try:
                dates.append(_dt.date.fromisoformat(row["date"].strip()))
                returns.append(float(row["returns"]))
                sentiment.append(float(row["sentiment"]))
                for name in exog_names:
                    exog[name].append(float(row[name]))
            except (ValueError, AttributeError):
                raise InputError(f"{path}:{line}: malformed panel row") from None
    if not dates:
        raise InputError(f"empty file: {path} (no records)")
    return AlignedPanel(
        dates=tuple(dates),
        returns=np.array(returns, dtype=np.float64),
        sentiment=np.array(sentiment, dtype=np.float64),
        exog={name: np.array(vals, dtype=np.float64) for name, vals in exog.items()},
    )


def write_outputs(bundle: ReportBundle, out_dir: str, zresid: np.ndarray) -> None:
    os.makedirs(out_dir, exist_ok=True)
    tables_dir = os.path.join(out_dir, "tables")
    figures_dir = os.path.join(out_dir, "figures")
    os.makedirs(tables_dir, exist_ok=True)
    os.makedirs(figures_dir, exist_ok=True)

    for name, table in bundle.tables.items():
        _write_text(os.path.join(tables_dir, f"{name}.txt"), table)
    _write_text(os.path.join(out_dir, "report.txt"), render_report_text(bundle))

    for which in bundle.figures:
        export_figure_data(bundle, which, os.path.join(figures_dir, f"{which}.csv"))

    _write_csv(
        os.path.join(out_dir, "daily_sentiment.csv"),
        ["date", "mean_score", "count"],
        [
            (d.isoformat(), float(s), int(c))
            for d, s, c in zip(bundle.daily.dates, bundle.daily.mean_scores, bundle.daily.counts)
        ],
    )
    _write_csv(
        os.path.join(out_dir, "category_distribution.csv"),
        ["label", "count"],
        sorted((label, int(c)) for label, c in bundle.distribution_counts.items()),
    )
    panel_to_csv(bundle.panel, os.path.join(out_dir, "panel.csv"))
    _write_csv(
        os.path.join(out_dir, "variance_path.csv"),
        ["date", "sigma2"],
        [
            (d.isoformat(), float(v))
            for d, v in zip(bundle.panel.dates, bundle.garch.variance_path)
        ],
    )
    _write_csv(
        os.path.join(out_dir, "standardized_residuals.csv"),
        ["date", "z"],
        [(d.isoformat(), float(z)) for d, z in zip(bundle.panel.dates, zresid)],
    )
    _write_text(
        os.path.join(out_dir, "metadata.json"),
        json.dumps(bundle.metadata, indent=2, sort_keys=True) + "\n",
    )
