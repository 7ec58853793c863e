"""Rolling-window symmetry diagnostics.

Each window holds ``window_days`` consecutive trading-day prices.  The
observable is rebuilt from scratch inside every window, so a trend that
straddles the window start is cut at the first price of the window.
"""

import csv
import io
from dataclasses import dataclass, field
from datetime import date

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_alpha
from .critical import lookup
from .exceptions import InsufficientData, NoSymmetryPoint, SeriesTooShort
from .ingest import PriceSeries
from .observables import KINDS, build_observable
from .scan import GridSpec, scan
from .tn import tn_shifted

__all__ = [
    "RollingConfig",
    "RollingPoint",
    "Event",
    "Annotation",
    "DEFAULT_EVENTS",
    "roll",
    "annotate",
    "read_events",
    "points_to_csv",
    "RollingSymmetry",
]

OK, NO_SYMMETRY, INSUFFICIENT = "ok", "no_symmetry_point", "insufficient_data"
MIN_ENTRIES = 30


@dataclass(frozen=True)
class RollingConfig:
    window_days: int = 252
    step_days: int = 1
    alpha: float = 0.05
    observable: str = "returns"
    grid: GridSpec = field(default_factory=GridSpec)

    def __post_init__(self):
        if self.window_days < 30:
            raise ValueError("window_days must be >= 30")
        if self.step_days < 1:
            raise ValueError("step_days must be >= 1")
        if self.observable not in KINDS:
            raise ValueError(f"observable must be one of {KINDS}")
        check_alpha(self.alpha)


@dataclass(frozen=True)
class RollingPoint:
    window_end_date: date
    n_obs: int
    status: str
    tn_at_zero: float | None = None
    c_star: float | None = None
    c_min: float | None = None
    c_max: float | None = None

    def to_dict(self):
        d = dict(self.__dict__)
        d["window_end_date"] = self.window_end_date.isoformat()
        return d


@dataclass(frozen=True)
class Event:
    label: str
    date: date


# Crisis dates as listed with the original study.  The Brexit row is kept
# verbatim although the referendum took place on 2016-06-23; as given it falls
# after a series ending 2017-06-30 and is reported as out of range.
DEFAULT_EVENTS = (
    Event("Japanese asset price bubble", date(1990, 1, 1)),
    Event("Tequila Effect", date(1994, 12, 20)),
    Event("Dotcom bubble", date(2000, 3, 10)),
    Event("Subprime crisis", date(2007, 8, 9)),
    Event("Brexit", date(2018, 6, 23)),
)


@dataclass(frozen=True)
class Annotation:
    event: Event
    point_index: int | None  # None when the event is out of range

    @property
    def outside_range(self):
        return self.point_index is None


def _window_point(end_date, prices, cfg, threshold):
    end = date.fromisoformat(str(end_date))
    obs = build_observable(prices, cfg.observable)
    n_obs = len(obs)
    if n_obs < MIN_ENTRIES:
        return RollingPoint(end, n_obs, INSUFFICIENT)
    try:
        tn0 = tn_shifted(obs.values, 0.0).statistic
    except InsufficientData:
        return RollingPoint(end, n_obs, INSUFFICIENT)
    try:
        res = scan(obs.values, cfg.alpha, cfg.grid, threshold)
    except NoSymmetryPoint:
        return RollingPoint(end, n_obs, NO_SYMMETRY, tn_at_zero=tn0)
    return RollingPoint(end, n_obs, OK, tn0, res.c_star, res.c_min, res.c_max)


def window_starts(length, window_days, step_days):
    return range(0, length - window_days + 1, step_days)


def roll(ps, cfg=None, n_jobs=None):
    """Symmetry diagnostics over sliding windows of trading days.

    Returns one :class:`RollingPoint` per window, in window order; there are
    ``(len(ps) - window_days) // step_days + 1`` of them.  ``n_jobs`` is
    passed to joblib; results do not depend on it.
    """
    cfg = cfg or RollingConfig()
    if len(ps) < cfg.window_days + 1:
        raise SeriesTooShort(
            f"{len(ps)} prices, need at least {cfg.window_days + 1}"
        )
    threshold = lookup(cfg.alpha).point
    w = cfg.window_days
    tasks = (
        delayed(_window_point)(ps.dates[s + w - 1], ps.prices[s : s + w], cfg, threshold)
        for s in window_starts(len(ps), w, cfg.step_days)
    )
    return Parallel(n_jobs=n_jobs)(tasks)


def annotate(points, events=DEFAULT_EVENTS, series_start=None):
    """Attach each event to the first window ending on or after its date.

    Events after the last window end, or before ``series_start`` when it is
    given, are flagged as out of range.  ``points`` must be in window order.
    """
    ends = np.array([p.window_end_date for p in points], dtype="datetime64[D]")
    start = None if series_start is None else date.fromisoformat(str(series_start))
    out = []
    for ev in events:
        idx = int(np.searchsorted(ends, np.datetime64(ev.date, "D"), side="left"))
        if idx >= ends.size or (start is not None and ev.date < start):
            out.append(Annotation(ev, None))
        else:
            out.append(Annotation(ev, idx))
    return out


def read_events(text):
    """Parse an events CSV with header ``label,date`` (ISO dates)."""
    rows = csv.DictReader(io.StringIO(text))
    if rows.fieldnames is None or not {"label", "date"} <= set(rows.fieldnames):
        raise ValueError("events CSV needs a 'label,date' header")
    return [Event(r["label"], date.fromisoformat(r["date"].strip())) for r in rows]


def _csv_cell(value):
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else value


def points_to_csv(points):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["window_end_date", "n_obs", "tn_at_zero", "c_star", "c_min", "c_max", "status"]
    writer.writerow(cols)
    for p in points:
        d = p.to_dict()
        writer.writerow([_csv_cell(d[c]) for c in cols])
    return buf.getvalue()


class RollingSymmetry(BaseEstimator):
    """Sliding-window symmetry diagnostics over a :class:`PriceSeries`.

    Attributes
    ----------
    points_ : list of RollingPoint
    """

    def __init__(self, window_days=252, step_days=1, alpha=0.05, observable="returns", n_jobs=None):
        self.window_days = window_days
        self.step_days = step_days
        self.alpha = alpha
        self.observable = observable
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        if not isinstance(X, PriceSeries):
            raise TypeError("RollingSymmetry.fit expects a PriceSeries")
        cfg = RollingConfig(self.window_days, self.step_days, self.alpha, self.observable)
        self.points_ = roll(X, cfg, n_jobs=self.n_jobs)
        return self

    def to_frame(self):
        check_is_fitted(self, "points_")
        return pd.DataFrame([p.to_dict() for p in self.points_])
