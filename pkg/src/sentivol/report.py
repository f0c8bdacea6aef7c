"""Rendering of coefficient/diagnostic/summary tables and export of
figure-ready CSV data.

All table numbers are rendered with 4 decimals; CSV exports keep full
precision. Absent cells render as an em dash.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from .errors import InputError
from .garch import GarchFit
from .ingest import AlignedPanel
from .regress import OlsFit, TestResult
from .sentiment import DailySentimentSeries
from .timeseries import SummaryStats

ABSENT = "—"

FIGURE_HEADERS = {
    "items_per_day": ("date", "count"),
    "daily_sentiment": ("date", "mean_score"),
    "category_distribution": ("label", "count"),
    "residuals_vs_sentiment": ("sentiment", "residual"),
    "qq": ("theoretical", "empirical"),
}


def _fmt_cell(value) -> str:
    if value is None:
        return ABSENT
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.4f}" if math.isfinite(float(value)) else ABSENT
    return str(value)


def render_table(
    rows: Sequence[tuple],
    footer: Sequence[tuple] = (),
    style: str = "plain",
    headers: Sequence[str] = ("Variable", "Coefficient", "Std Error", "p-value"),
) -> str:
    """Render rows of (name, *cells) plus (label, value) footer lines.

    The first column is left-aligned text; remaining cells are numbers
    formatted to 4 decimals, with None rendered as an em dash.
    """
    if style not in ("plain", "markdown"):
        raise InputError(f"unknown table style {style!r}")
    body = [[str(r[0]), *[_fmt_cell(c) for c in r[1:]]] for r in rows]
    foot = [(str(label), _fmt_cell(value)) for label, value in footer]

    if style == "markdown":
        lines = [
            "| " + " | ".join(headers) + " |",
            "| " + " | ".join([":---"] + ["---:"] * (len(headers) - 1)) + " |",
        ]
        for cells in body:
            padded = cells + [""] * (len(headers) - len(cells))
            lines.append("| " + " | ".join(padded) + " |")
        for label, value in foot:
            padded = [label, value] + [""] * (len(headers) - 2)
            lines.append("| " + " | ".join(padded) + " |")
        return "\n".join(lines) + "\n"

    ncols = len(headers)
    widths = [len(h) for h in headers]
    for cells in body:
        for i, cell in enumerate(cells):
            widths[i] = max(widths[i], len(cell))
    for label, value in foot:
        widths[0] = max(widths[0], len(label))
        if ncols > 1:
            widths[1] = max(widths[1], len(value))

    def line(cells: Sequence[str]) -> str:
        parts = [f"{cells[0]:<{widths[0]}}"]
        parts += [f"{c:>{widths[i + 1]}}" for i, c in enumerate(cells[1:])]
        return "  ".join(parts).rstrip()

    rule = "-" * (sum(widths) + 2 * (ncols - 1))
    lines = [line(list(headers)), rule]
    lines += [line(cells + [""] * (ncols - len(cells))) for cells in body]
    if foot:
        lines.append(rule)
        lines += [line([label, value] + [""] * (ncols - 2)) for label, value in foot]
    return "\n".join(lines) + "\n"


def _garch_param_rows(fit: GarchFit, names: Sequence[str]) -> list[tuple]:
    p = fit.params
    values = [p.mu, *p.betas, p.alpha0, p.alpha1, p.beta1]
    labels = list(names) + ["Variance constant (alpha0)", "ARCH (alpha1)", "GARCH (beta1)"]
    if p.nu is not None:
        values.append(p.nu)
        labels.append("Tail dof (nu)")
    ses = fit.std_errors
    rows = []
    for i, (label, value) in enumerate(zip(labels, values)):
        se = None
        pval = None
        if ses is not None and i < len(ses) and math.isfinite(ses[i]) and ses[i] > 0:
            se = float(ses[i])
            pval = float(2.0 * stats.norm.sf(abs(value / se)))
        rows.append((label, float(value), se, pval))
    return rows


def render_coefficient_table(
    fit,
    style: str = "plain",
    names: Optional[Sequence[str]] = None,
    extra_footer: Sequence[tuple] = (),
) -> str:
    """Coefficient table for an OlsFit or GarchFit.

    names labels the mean-equation coefficients, intercept first; defaults
    to Constant, x1, x2, ... Missing standard errors render as an em dash.
    """
    if isinstance(fit, OlsFit):
        k = len(fit.coefficients)
        labels = list(names) if names is not None else ["Constant"] + [f"x{i}" for i in range(1, k)]
        if len(labels) != k:
            raise InputError(f"expected {k} names, got {len(labels)}")
        rows = [
            (labels[i], float(fit.coefficients[i]), float(fit.std_errors[i]), float(fit.p_values[i]))
            for i in range(k)
        ]
        footer = [
            ("Observations", fit.n_obs),
            ("R-squared", fit.r2),
            ("Adjusted R-squared", fit.adj_r2),
            ("F-statistic", fit.f_statistic),
            ("F p-value", fit.f_p_value),
            *extra_footer,
        ]
        return render_table(rows, footer, style=style)

    if isinstance(fit, GarchFit):
        n_mean = 1 + fit.params.betas.size
        labels = list(names) if names is not None else ["Constant"] + [f"x{i}" for i in range(1, n_mean)]
        if len(labels) != n_mean:
            raise InputError(f"expected {n_mean} names, got {len(labels)}")
        rows = _garch_param_rows(fit, labels)
        footer = [
            ("Observations", fit.variance_path.size),
            ("Log-likelihood", fit.log_likelihood),
            ("Distribution", fit.distribution),
            ("Estimation mode", fit.mode),
            ("Converged", fit.converged),
            *extra_footer,
        ]
        return render_table(rows, footer, style=style)

    raise InputError(f"cannot render a coefficient table for {type(fit).__name__}")


def render_diagnostics_table(
    bp: TestResult,
    dw: TestResult,
    vifs: Sequence[tuple[str, float]],
    style: str = "plain",
) -> str:
    """One table for the three mean-equation diagnostics."""
    bp_label = "Breusch-Pagan"
    if bp.degrees_of_freedom is not None:
        bp_label += f" (df={bp.degrees_of_freedom})"
    rows = [
        (bp_label, bp.statistic, bp.p_value),
        ("Durbin-Watson", dw.statistic, dw.p_value),
    ]
    footer = [(f"VIF: {name}", float(value) if math.isfinite(value) else None) for name, value in vifs]
    table = render_table(rows, footer, style=style, headers=("Diagnostic", "Statistic", "p-value"))
    note = "Note: the Durbin-Watson p-value is a large-sample normal approximation."
    return table + note + "\n"


def render_summary_table(summary: dict[str, SummaryStats], style: str = "plain") -> str:
    rows = [
        (name, s.count, s.mean, s.std_dev, s.min, s.max, s.skewness, s.excess_kurtosis)
        for name, s in summary.items()
    ]
    headers = ("Variable", "Count", "Mean", "Std Dev", "Min", "Max", "Skewness", "Ex. Kurtosis")
    return render_table(rows, footer=(), style=style, headers=headers)


@dataclass
class ReportBundle:
    """Everything one pipeline run produced: fits, tables, figure data, metadata."""

    config_echo: dict
    panel: AlignedPanel
    daily: DailySentimentSeries
    distribution_counts: dict[str, int]
    ols: OlsFit
    regressor_names: tuple[str, ...]
    bp: TestResult
    dw: TestResult
    vifs: tuple[tuple[str, float], ...]
    garch: GarchFit
    summary: dict[str, SummaryStats]
    figures: dict[str, list[tuple]]
    tables: dict[str, str] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)


def figure_rows(bundle: ReportBundle, which: str) -> list[tuple]:
    if which not in FIGURE_HEADERS:
        raise InputError(f"unknown figure {which!r} (expected one of {sorted(FIGURE_HEADERS)})")
    if which not in bundle.figures:
        raise InputError(f"bundle is missing series for figure {which!r}")
    return bundle.figures[which]


def export_figure_data(bundle: ReportBundle, which: str, path: str) -> str:
    """Write one figure's data as CSV, sorted by the x column; returns path."""
    rows = figure_rows(bundle, which)
    header = FIGURE_HEADERS[which]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")
    return path


def _csv_cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)
