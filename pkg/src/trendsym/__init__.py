"""Empirical-likelihood symmetry analysis of daily and trend-based returns."""

__version__ = "0.1.0"

from .critical import ASYMPTOTIC_TABLE, McConfig, lookup, simulate_quantile
from .ingest import PriceSeries, parse_csv, read_csv, serialize_csv
from .observables import (
    ObservableTransformer,
    build_observable,
    daily_returns,
    density_profile,
    describe,
    segment_trends,
    trend_returns,
)
from .rolling import RollingConfig, RollingSymmetry, annotate, roll
from .scan import GridSpec, SymmetryPointEstimator, SymmetryTest, exact_breakpoints, scan
from .tn import tn, tn_shifted

__all__ = [
    "ASYMPTOTIC_TABLE",
    "GridSpec",
    "McConfig",
    "ObservableTransformer",
    "PriceSeries",
    "RollingConfig",
    "RollingSymmetry",
    "SymmetryPointEstimator",
    "SymmetryTest",
    "annotate",
    "build_observable",
    "daily_returns",
    "density_profile",
    "describe",
    "exact_breakpoints",
    "lookup",
    "parse_csv",
    "read_csv",
    "roll",
    "scan",
    "segment_trends",
    "serialize_csv",
    "simulate_quantile",
    "tn",
    "tn_shifted",
    "trend_returns",
]
