"""News-sentiment scoring and GARCH(1,1) volatility modelling for daily
market returns: file ingestion, sentiment aggregation, spline gap-filling,
OLS with diagnostics, and Student-t or normal GARCH estimation."""

__version__ = "0.1.0"

from .errors import (
    InputError,
    MalformedRecordError,
    NumericalError,
    PipelineStageError,
    SentivolError,
)
from .garch import GarchFit, GarchParams
from .ingest import AlignedPanel, Headline
from .regress import OlsFit, TestResult
from .sentiment import DailySentimentSeries, ScoredHeadline
from .timeseries import MarketSeries, Spline, SummaryStats

__all__ = [
    "__version__",
    "AlignedPanel",
    "DailySentimentSeries",
    "GarchFit",
    "GarchParams",
    "Headline",
    "InputError",
    "MalformedRecordError",
    "MarketSeries",
    "NumericalError",
    "OlsFit",
    "PipelineStageError",
    "ScoredHeadline",
    "SentivolError",
    "Spline",
    "SummaryStats",
    "TestResult",
]
