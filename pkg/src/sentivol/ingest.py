"""File ingestion for headlines and market series, text normalization,
keyword filtering, and alignment onto a common trading-day calendar.

CSV files are RFC-4180-style with a header row, UTF-8, ISO-8601 dates.
JSONL headline files carry one object per line with keys date, title,
optional body, optional logits=[pos, neg, neu], optional source.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import os
import re
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, MalformedRecordError
from .sentiment import DailySentimentSeries
from .timeseries import MarketSeries, fill_missing

_NON_WORD = re.compile(r"[^\w\s]|_")
_WHITESPACE = re.compile(r"\s+")


@dataclass(frozen=True)
class Headline:
    """One news item; logits are (positive, negative, neutral) when present."""

    date: dt.date
    source: str
    title: str
    body: Optional[str] = None
    logits: Optional[tuple[float, float, float]] = None

    def __post_init__(self) -> None:
        if not isinstance(self.date, dt.date):
            raise InputError("headline date must be a calendar date")
        if self.logits is not None:
            if len(self.logits) != 3 or not all(np.isfinite(v) for v in self.logits):
                raise InputError("logits must be three finite numbers")


def normalize_text(text: str) -> str:
    """Lowercase, strip punctuation/special characters, collapse whitespace."""
    lowered = text.lower()
    cleaned = _NON_WORD.sub("", lowered)
    return _WHITESPACE.sub(" ", cleaned).strip()


def _parse_date(raw: str, path: str, line: int) -> dt.date:
    try:
        return dt.date.fromisoformat(raw.strip())
    except ValueError:
        raise MalformedRecordError(f"unparseable date {raw!r}", path, line) from None


def _parse_logits(values: Sequence, path: str, line: int) -> tuple[float, float, float]:
    if len(values) != 3:
        raise MalformedRecordError("logits must have exactly three entries", path, line)
    try:
        trio = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise MalformedRecordError(f"non-numeric logits {values!r}", path, line) from None
    if not all(np.isfinite(v) for v in trio):
        raise MalformedRecordError(f"non-finite logits {values!r}", path, line)
    return trio  # type: ignore[return-value]


def _headline_from_csv_row(row: dict, path: str, line: int) -> Headline:
    if row.get("date") is None or row.get("title") is None:
        raise MalformedRecordError("record needs date and title fields", path, line)
    date = _parse_date(row["date"], path, line)
    logit_cells = [row.get(c) for c in ("pos", "neg", "neu")]
    present = [c for c in logit_cells if c not in (None, "")]
    logits = None
    if len(present) == 3:
        logits = _parse_logits(present, path, line)
    elif present:
        raise MalformedRecordError("partial logits: need all of pos, neg, neu", path, line)
    body = row.get("body") or None
    return Headline(
        date=date,
        source=(row.get("source") or "").strip(),
        title=row["title"],
        body=body,
        logits=logits,
    )


def _headline_from_json_line(raw: str, path: str, line: int) -> Headline:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"invalid JSON: {exc.msg}", path, line) from None
    if not isinstance(obj, dict) or "date" not in obj or "title" not in obj:
        raise MalformedRecordError("record needs date and title keys", path, line)
    date = _parse_date(str(obj["date"]), path, line)
    logits = None
    if obj.get("logits") is not None:
        logits = _parse_logits(obj["logits"], path, line)
    return Headline(
        date=date,
        source=str(obj.get("source", "")),
        title=str(obj["title"]),
        body=obj.get("body"),
        logits=logits,
    )


def load_headlines(path: str, format: str = "csv") -> list[Headline]:
    """Parse a headline file; bad records raise with their line number."""
    if format not in ("csv", "jsonl"):
        raise InputError(f"unknown headline format {format!r} (expected csv or jsonl)")
    if not os.path.isfile(path):
        raise InputError(f"file not found: {path}")
    headlines: list[Headline] = []
    with open(path, newline="", encoding="utf-8") as fh:
        if format == "csv":
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise InputError(f"empty file: {path}")
            for row in reader:
                headlines.append(_headline_from_csv_row(row, path, reader.line_num))
        else:
            for line_num, raw in enumerate(fh, start=1):
                if not raw.strip():
                    continue
                headlines.append(_headline_from_json_line(raw, path, line_num))
    if not headlines:
        raise InputError(f"empty file: {path} (no records)")
    return headlines


def filter_by_keywords(headlines: list[Headline], keywords: list[str]) -> list[Headline]:
    """Keep headlines whose normalized title+body contains any keyword.

    Matching is case-insensitive substring on normalized text; keywords
    that normalize to nothing are ignored. Order is preserved.
    """
    if not keywords:
        raise InputError("keyword list must be nonempty")
    needles = [normalize_text(k) for k in keywords]
    needles = [k for k in needles if k]
    if not needles:
        raise InputError("keyword list is empty after normalization")
    kept = []
    for h in headlines:
        haystack = normalize_text(h.title if h.body is None else f"{h.title} {h.body}")
        if any(k in haystack for k in needles):
            kept.append(h)
    return kept


def load_market_series(path: str, name: str, date_column: str, value_column: str) -> MarketSeries:
    """Read one (date, value) series from CSV; duplicate dates are an error."""
    if not os.path.isfile(path):
        raise InputError(f"file not found: {path}")
    points: dict[dt.date, float] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"empty file: {path}")
        missing = [c for c in (date_column, value_column) if c not in reader.fieldnames]
        if missing:
            raise InputError(f"{path}: missing column(s) {missing} (header: {reader.fieldnames})")
        for row in reader:
            line = reader.line_num
            date = _parse_date(row[date_column], path, line)
            if date in points:
                raise InputError(f"{path}:{line}: duplicate date {date.isoformat()}")
            raw = (row[value_column] or "").strip()
            try:
                value = float(raw)
            except ValueError:
                raise InputError(f"{path}:{line}: non-numeric value {raw!r}") from None
            points[date] = value
    if not points:
        raise InputError(f"empty file: {path} (no records)")
    dates = sorted(points)
    return MarketSeries(
        name=name,
        dates=tuple(dates),
        values=np.array([points[d] for d in dates], dtype=np.float64),
    )


@dataclass(frozen=True)
class AlignedPanel:
    """Date-indexed join of returns, sentiment, and exogenous columns with no gaps."""

    dates: tuple[dt.date, ...]
    returns: np.ndarray
    sentiment: np.ndarray
    exog: dict[str, np.ndarray]

    def __post_init__(self) -> None:
        n = len(self.dates)
        if n == 0:
            raise InputError("aligned panel must be nonempty")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise InputError("panel dates must be strictly increasing")
        if len(self.returns) != n or len(self.sentiment) != n:
            raise InputError("returns and sentiment must match the dates length")
        for col, values in self.exog.items():
            if len(values) != n:
                raise InputError(f"exog column {col!r} length differs from dates")
            if not np.all(np.isfinite(values)):
                raise InputError(f"exog column {col!r} has non-finite cells")

    @property
    def exog_names(self) -> tuple[str, ...]:
        return tuple(self.exog)

    def exog_matrix(self) -> np.ndarray:
        return np.column_stack([self.exog[name] for name in self.exog])

    def __len__(self) -> int:
        return len(self.dates)


def align_panel(
    returns: MarketSeries,
    sentiment: DailySentimentSeries,
    exog: list[MarketSeries],
    fill: str = "spline",
) -> AlignedPanel:
    """Join everything onto the dates where returns exist.

    fill="spline" interpolates gaps inside each column's known span
    (dates outside any span are dropped, never extrapolated);
    fill="drop" keeps only dates every column observed directly.
    """
    if fill not in ("spline", "drop"):
        raise InputError(f"unknown fill mode {fill!r} (expected spline or drop)")
    if len(returns) == 0 or len(sentiment) == 0:
        raise InputError("returns and sentiment must be nonempty")

    columns: dict[str, MarketSeries] = {
        "sentiment": MarketSeries(
            name="sentiment",
            dates=sentiment.dates,
            values=np.asarray(sentiment.mean_scores, dtype=np.float64),
        )
    }
    for series in exog:
        if series.name in columns:
            raise InputError(f"duplicate column name {series.name!r}")
        if len(series) == 0:
            raise InputError(f"exogenous series {series.name!r} is empty")
        columns[series.name] = series

    calendar = list(returns.dates)
    if fill == "drop":
        observed = [set(col.dates) for col in columns.values()]
        keep = [d for d in calendar if all(d in dates for dates in observed)]
    else:
        for name, col in columns.items():
            if len(col) < 2:
                raise InputError(
                    f"spline fill impossible for column {name!r}: fewer than 2 known points"
                )
        keep = [
            d for d in calendar
            if all(col.dates[0] <= d <= col.dates[-1] for col in columns.values())
        ]
    if not keep:
        raise InputError("empty intersection: no returns date is covered by every column")

    ret_values = dict(zip(returns.dates, returns.values))
    filled: dict[str, np.ndarray] = {}
    for name, col in columns.items():
        if fill == "drop":
            lookup = dict(zip(col.dates, col.values))
            filled[name] = np.array([lookup[d] for d in keep], dtype=np.float64)
        else:
            filled[name] = fill_missing(col, keep).values

    return AlignedPanel(
        dates=tuple(keep),
        returns=np.array([ret_values[d] for d in keep], dtype=np.float64),
        sentiment=filled.pop("sentiment"),
        exog=filled,
    )
