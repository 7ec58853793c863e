"""Daily returns and uninterrupted-trend observables.

An uptrend of duration k is k+1 consecutive prices each strictly greater
than the one before; a downtrend is k+1 prices each smaller than or equal to
the one before.  Zero daily changes therefore belong to downtrends.  Trends
tile the series: consecutive trends share one boundary price and alternate
in direction.

* Returns    -- daily log changes.
* TReturns   -- log change over a whole trend.
* TVReturns  -- TReturn divided by the trend duration in days.
"""

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_sample
from .exceptions import EmptySeries, InsufficientData
from .ingest import PriceSeries

__all__ = [
    "KINDS",
    "Trend",
    "ObservableSeries",
    "DescriptiveStats",
    "DensityProfile",
    "daily_returns",
    "segment_trends",
    "trend_returns",
    "build_observable",
    "describe",
    "density_profile",
    "silverman_bandwidth",
    "ObservableTransformer",
]

KINDS = ("returns", "treturns", "tvreturns")
UP, DOWN = "up", "down"


@dataclass(frozen=True)
class Trend:
    start_index: int
    duration: int
    direction: str
    log_change: float

    @property
    def end_index(self):
        return self.start_index + self.duration


@dataclass(frozen=True, eq=False)
class ObservableSeries:
    """Values of one observable with optional per-trend metadata.

    ``start_index``, ``duration`` and ``up`` are None for daily returns.
    """

    kind: str
    values: np.ndarray
    start_index: np.ndarray | None = None
    duration: np.ndarray | None = None
    up: np.ndarray | None = None

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, ObservableSeries):
            return NotImplemented
        fields = ("values", "start_index", "duration", "up")
        return self.kind == other.kind and all(
            _arrays_equal(getattr(self, f), getattr(other, f)) for f in fields
        )

    @property
    def has_meta(self):
        return self.duration is not None

    def directions(self):
        if not self.has_meta:
            return None
        return np.where(self.up, UP, DOWN)

    def records(self):
        dirs = self.directions()
        for i, v in enumerate(self.values):
            if self.has_meta:
                yield {
                    "index": i,
                    "value": float(v),
                    "start_index": int(self.start_index[i]),
                    "duration": int(self.duration[i]),
                    "direction": str(dirs[i]),
                }
            else:
                yield {
                    "index": i,
                    "value": float(v),
                    "start_index": None,
                    "duration": None,
                    "direction": None,
                }

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "value", "start_index", "duration", "direction"])
        for rec in self.records():
            writer.writerow(
                [
                    rec["index"],
                    repr(rec["value"]),
                    "" if rec["start_index"] is None else rec["start_index"],
                    "" if rec["duration"] is None else rec["duration"],
                    rec["direction"] or "",
                ]
            )
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"kind": self.kind, "entries": list(self.records())})

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        entries = doc["entries"]
        values = np.array([e["value"] for e in entries], dtype=np.float64)
        if doc["kind"] == "returns":
            return cls("returns", values)
        return cls(
            doc["kind"],
            values,
            np.array([e["start_index"] for e in entries], dtype=np.int64),
            np.array([e["duration"] for e in entries], dtype=np.int64),
            np.array([e["direction"] == UP for e in entries]),
        )

    @classmethod
    def from_csv(cls, text, kind):
        rows = list(csv.DictReader(io.StringIO(text)))
        values = np.array([float(r["value"]) for r in rows])
        if kind == "returns":
            return cls(kind, values)
        return cls(
            kind,
            values,
            np.array([int(r["start_index"]) for r in rows], dtype=np.int64),
            np.array([int(r["duration"]) for r in rows], dtype=np.int64),
            np.array([r["direction"] == UP for r in rows]),
        )


def _arrays_equal(a, b):
    if a is None or b is None:
        return a is None and b is None
    return np.array_equal(a, b)


def _prices(ps):
    if isinstance(ps, PriceSeries):
        return ps.prices
    prices = check_sample(ps, min_size=0, name="prices")
    if prices.size < 2:
        raise EmptySeries(f"need at least 2 prices, got {prices.size}")
    if np.any(prices <= 0):
        raise ValueError("prices must be positive")
    return prices


def daily_returns(ps):
    """Log returns ``log P[i+1] - log P[i]``."""
    log_p = np.log(_prices(ps))
    return ObservableSeries("returns", np.diff(log_p))


def _trend_bounds(prices):
    """Start indices, durations and directions of the maximal runs."""
    up = np.diff(prices) > 0
    change = np.flatnonzero(up[1:] != up[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [up.size]))
    return starts, ends - starts, up[starts]


def segment_trends(ps):
    """Split a price series into alternating maximal up/down trends."""
    prices = _prices(ps)
    log_p = np.log(prices)
    starts, durations, up = _trend_bounds(prices)
    return [
        Trend(int(s), int(k), UP if u else DOWN, float(log_p[s + k] - log_p[s]))
        for s, k, u in zip(starts, durations, up)
    ]


def trend_returns(trends, kind="treturns"):
    """TReturns or TVReturns from a list of trends."""
    if kind not in ("treturns", "tvreturns"):
        raise ValueError("kind must be 'treturns' or 'tvreturns'")
    if not trends:
        raise EmptySeries("no trends")
    starts = np.array([t.start_index for t in trends], dtype=np.int64)
    durations = np.array([t.duration for t in trends], dtype=np.int64)
    up = np.array([t.direction == UP for t in trends])
    values = np.array([t.log_change for t in trends])
    if kind == "tvreturns":
        values = values / durations
    return ObservableSeries(kind, values, starts, durations, up)


def build_observable(ps, kind):
    """Build any of the three observables straight from prices."""
    kind = kind.lower()
    if kind == "returns":
        return daily_returns(ps)
    if kind not in KINDS:
        raise ValueError(f"unknown observable {kind!r}; expected one of {KINDS}")
    prices = _prices(ps)
    log_p = np.log(prices)
    starts, durations, up = _trend_bounds(prices)
    values = log_p[starts + durations] - log_p[starts]
    if kind == "tvreturns":
        values = values / durations
    return ObservableSeries(kind, values, starts, durations, up)


@dataclass(frozen=True)
class DescriptiveStats:
    """Moments of an observable; kurtosis is Pearson (normal = 3)."""

    n: int
    mean: float
    std: float
    sem: float
    skewness: float
    kurtosis: float

    def to_dict(self):
        return dict(self.__dict__)


def describe(s):
    """Mean, sample std (n-1), standardized 3rd and 4th moments."""
    values = s.values if isinstance(s, ObservableSeries) else np.asarray(s, float)
    n = values.size
    if n < 2:
        raise InsufficientData(f"describe needs n >= 2, got {n}")
    std = float(np.std(values, ddof=1))
    if std == 0.0:
        skew = kurt = math.nan
    else:
        skew = float(stats.skew(values, bias=True))
        kurt = float(stats.kurtosis(values, fisher=False, bias=True))
    return DescriptiveStats(
        n=n,
        mean=float(np.mean(values)),
        std=std,
        sem=std / math.sqrt(n),
        skewness=skew,
        kurtosis=kurt,
    )


@dataclass(frozen=True, eq=False)
class DensityProfile:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float
    modes: list  # (location, height), highest first
    peak_ratio: float | None


def silverman_bandwidth(values):
    """``0.9 * min(std, IQR / 1.34) * n ** (-1/5)``."""
    values = np.asarray(values, dtype=np.float64)
    std = np.std(values, ddof=1)
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(std, (q75 - q25) / 1.34)
    if spread <= 0:
        spread = std
    return 0.9 * spread * values.size ** (-0.2)


def _local_maxima(density, min_sep=2):
    idx = np.flatnonzero(
        (density[1:-1] > density[:-2]) & (density[1:-1] > density[2:])
    ) + 1
    # merge maxima closer than `min_sep` grid cells, keeping the higher one
    kept = []
    for i in idx:
        if kept and i - kept[-1] < min_sep:
            if density[i] > density[kept[-1]]:
                kept[-1] = i
        else:
            kept.append(i)
    return kept


def density_profile(s, grid_points=512, bandwidth=None, min_mode_height=0.01):
    """Gaussian KDE with modes and the ratio of the two highest peaks.

    The grid spans ``[min - 3h, max + 3h]``.  Kernel mass leaking past the
    grid ends is restored by renormalising to unit trapezoid integral.
    Local maxima lower than ``min_mode_height`` times the tallest one are
    not reported as modes; isolated tail observations otherwise each
    produce one.
    """
    values = s.values if isinstance(s, ObservableSeries) else check_sample(s)
    n = values.size
    if n < 10:
        raise InsufficientData(f"density_profile needs n >= 10, got {n}")
    h = float(bandwidth) if bandwidth is not None else silverman_bandwidth(values)
    if not h > 0:
        raise InsufficientData("sample has no spread; bandwidth is zero")
    grid = np.linspace(values.min() - 3 * h, values.max() + 3 * h, grid_points)
    density = np.zeros(grid_points)
    for chunk in np.array_split(values, max(1, n // 4096)):
        u = (grid[:, None] - chunk[None, :]) / h
        density += np.exp(-0.5 * u * u).sum(axis=1)
    density /= n * h * math.sqrt(2 * math.pi)
    density /= np.trapezoid(density, grid)

    peaks = sorted(_local_maxima(density), key=lambda i: -density[i])
    if peaks:
        floor = min_mode_height * density[peaks[0]]
        peaks = [i for i in peaks if density[i] >= floor]
    modes = [(float(grid[i]), float(density[i])) for i in peaks]
    ratio = modes[0][1] / modes[1][1] if len(modes) >= 2 else None
    return DensityProfile(grid, density, h, modes, ratio)


class ObservableTransformer(TransformerMixin, BaseEstimator):
    """Turn a price series into Returns, TReturns or TVReturns values.

    Stateless; ``fit`` only validates parameters.

    Parameters
    ----------
    kind : {"returns", "treturns", "tvreturns"}
    """

    def __init__(self, kind="returns"):
        self.kind = kind

    def fit(self, X=None, y=None):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        self.kind_ = self.kind
        return self

    def transform(self, X):
        return build_observable(X, self.kind).values

    def transform_series(self, X):
        return build_observable(X, self.kind)
