"""Headline-level sentiment scores and their daily aggregation.

Converts per-headline class logits (positive, negative, neutral) into
probabilities, a predicted label, and a scalar score, then aggregates
scores into a daily mean series and a category distribution.
"""

from __future__ import annotations

import datetime as dt
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import InputError

LABELS = ("positive", "negative", "neutral")

# Toy keyword scorer used only when no classifier logits are supplied.
# Deliberately small; not a substitute for a trained model.
_POSITIVE_WORDS = frozenset({
    "rally", "gains", "gain", "surge", "boom", "rebound", "recovery",
    "optimism", "upbeat", "profit", "profits", "soar",
})
_NEGATIVE_WORDS = frozenset({
    "war", "crisis", "losses", "loss", "conflict", "fear", "recession",
    "crash", "sanctions", "invasion", "escalation", "slump", "decline",
})


def softmax(logits) -> np.ndarray:
    """Map K real logits to a probability vector summing to 1.

    Computed as exp(z - max(z)) / sum(exp(z - max(z))) so that large
    logits cannot overflow.
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 1 or z.size < 1:
        raise InputError("softmax expects a nonempty 1-d vector of logits")
    if not np.all(np.isfinite(z)):
        raise InputError("softmax requires all logits finite")
    shifted = z - z.max()
    expz = np.exp(shifted)
    return expz / expz.sum()


def predict_class(logits) -> str:
    """Label of the maximal logit; ties go to the first of (positive, negative, neutral)."""
    z = np.asarray(logits, dtype=np.float64)
    if z.shape != (3,):
        raise InputError("predict_class expects exactly three logits")
    if not np.all(np.isfinite(z)):
        raise InputError("predict_class requires finite logits")
    return LABELS[int(np.argmax(z))]


def sentiment_score(logits, mode: str = "prob_diff") -> float:
    """Scalar sentiment of one headline from its (pos, neg, neu) logits.

    prob_diff: softmax(logits)[pos] - softmax(logits)[neg], bounded in (-1, 1).
    logit_diff: raw logits[pos] - logits[neg].
    """
    z = np.asarray(logits, dtype=np.float64)
    if z.shape != (3,):
        raise InputError("sentiment_score expects exactly three logits")
    if not np.all(np.isfinite(z)):
        raise InputError("sentiment_score requires finite logits")
    if mode == "prob_diff":
        p = softmax(z)
        return float(p[0] - p[1])
    if mode == "logit_diff":
        return float(z[0] - z[1])
    raise InputError(f"unknown score mode {mode!r} (expected prob_diff or logit_diff)")


def lexicon_score(text: str) -> tuple[float, float, float]:
    """Deterministic pseudo-logits from keyword counts on normalized text.

    Returns (count of positive words, count of negative words, 0.5).
    A demo fallback for headlines shipped without classifier logits;
    documented as a toy scorer, not a model substitute.
    """
    tokens = text.split()
    pos = float(sum(1 for tok in tokens if tok in _POSITIVE_WORDS))
    neg = float(sum(1 for tok in tokens if tok in _NEGATIVE_WORDS))
    return (pos, neg, 0.5)


@dataclass(frozen=True)
class ScoredHeadline:
    """One headline after scoring: class probabilities, label, and scalar score."""

    date: dt.date
    probs: tuple[float, float, float]
    label: str
    score: float

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (3,) or np.any(p < 0.0) or np.any(p > 1.0):
            raise InputError("probs must be three values in [0, 1]")
        if abs(float(p.sum()) - 1.0) > 1e-9:
            raise InputError("probs must sum to 1 within 1e-9")
        if self.label != LABELS[int(np.argmax(p))]:
            raise InputError("label must be the class of maximal probability")
        if not np.isfinite(self.score):
            raise InputError("score must be finite")

    @classmethod
    def from_logits(cls, date: dt.date, logits, mode: str = "prob_diff") -> "ScoredHeadline":
        p = softmax(np.asarray(logits, dtype=np.float64))
        return cls(
            date=date,
            probs=(float(p[0]), float(p[1]), float(p[2])),
            label=predict_class(logits),
            score=sentiment_score(logits, mode=mode),
        )


@dataclass(frozen=True)
class DailySentimentSeries:
    """Per-day mean sentiment score and headline count, dates strictly increasing."""

    dates: tuple[dt.date, ...]
    mean_scores: np.ndarray
    counts: np.ndarray

    def __post_init__(self) -> None:
        if not (len(self.dates) == len(self.mean_scores) == len(self.counts)):
            raise InputError("dates, mean_scores, and counts must have equal length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise InputError("dates must be strictly increasing")
        if np.any(np.asarray(self.counts) < 1):
            raise InputError("every date needs at least one headline")

    def __len__(self) -> int:
        return len(self.dates)


def aggregate_daily(scored: list[ScoredHeadline]) -> DailySentimentSeries:
    """Arithmetic mean of scores per distinct date, sorted by date."""
    if not scored:
        raise InputError("aggregate_daily requires at least one scored headline")
    by_date: dict[dt.date, list[float]] = {}
    for item in scored:
        by_date.setdefault(item.date, []).append(item.score)
    dates = tuple(sorted(by_date))
    means = np.array([np.mean(by_date[d]) for d in dates], dtype=np.float64)
    counts = np.array([len(by_date[d]) for d in dates], dtype=np.int64)
    return DailySentimentSeries(dates=dates, mean_scores=means, counts=counts)


def category_distribution(scored: list[ScoredHeadline]) -> dict[str, int]:
    """Headline counts per label; always contains all three labels."""
    counter = Counter(item.label for item in scored)
    return {label: counter.get(label, 0) for label in LABELS}
