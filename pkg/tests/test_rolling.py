from datetime import date

import numpy as np
import pandas as pd
import pytest

from conftest import random_walk
from trendsym.exceptions import SeriesTooShort
from trendsym.ingest import PriceSeries
from trendsym.observables import build_observable
from trendsym.rolling import (
    DEFAULT_EVENTS,
    Event,
    RollingConfig,
    RollingSymmetry,
    annotate,
    points_to_csv,
    read_events,
    roll,
)
from trendsym.scan import scan
from trendsym.tn import tn


def series(prices, start="1995-01-02"):
    dates = pd.bdate_range(start, periods=len(prices)).values.astype("datetime64[D]")
    return PriceSeries(dates, np.asarray(prices, dtype=float), "SYN")


def test_point_count(rng):
    ps = series(random_walk(300, rng))
    pts = roll(ps, RollingConfig(window_days=252))
    assert len(pts) == 300 - 252 + 1
    pts = roll(ps, RollingConfig(window_days=100, step_days=7))
    assert len(pts) == (300 - 100) // 7 + 1
    assert pts[0].window_end_date == date.fromisoformat(str(ps.dates[99]))


def test_too_short(rng):
    with pytest.raises(SeriesTooShort):
        roll(series(random_walk(252, rng)), RollingConfig(window_days=252))


def test_constant_series_insufficient():
    pts = roll(series(np.full(300, 50.0)), RollingConfig(window_days=252))
    assert {p.status for p in pts} == {"insufficient_data"}
    assert all(p.c_star is None for p in pts)


def test_trend_observable_short_window_insufficient(rng):
    # 40 prices hold far fewer than 30 trends
    pts = roll(series(random_walk(60, rng)), RollingConfig(window_days=40, observable="treturns"))
    assert all(p.status == "insufficient_data" for p in pts)


def test_windows_independent(rng):
    ps = series(random_walk(700, rng))
    cfg = RollingConfig(window_days=252, step_days=3)
    pts = roll(ps, cfg)
    for k in rng.choice(len(pts), size=10, replace=False):
        s = k * cfg.step_days
        obs = build_observable(ps.slice(s, s + cfg.window_days), "returns")
        res = scan(obs.values, cfg.alpha, cfg.grid)
        p = pts[k]
        assert p.status == "ok"
        assert p.tn_at_zero == tn(obs.values).statistic
        assert (p.c_min, p.c_star, p.c_max) == (res.c_min, res.c_star, res.c_max)


def test_ok_invariants_and_determinism(rng):
    ps = series(random_walk(400, rng))
    cfg = RollingConfig(window_days=120, step_days=5)
    a = roll(ps, cfg)
    b = roll(ps, cfg, n_jobs=2)
    assert a == b
    assert points_to_csv(a) == points_to_csv(b)
    for p in a:
        if p.status == "ok":
            assert p.c_min <= p.c_star <= p.c_max


def test_csv_layout(rng):
    pts = roll(series(random_walk(300, rng)), RollingConfig(window_days=252, step_days=10))
    lines = points_to_csv(pts).splitlines()
    assert lines[0] == "window_end_date,n_obs,tn_at_zero,c_star,c_min,c_max,status"
    assert len(lines) == len(pts) + 1


def test_annotate_defaults():
    ps = series(np.full(7000, 10.0) * np.exp(np.arange(7000) * 1e-5), start="1990-01-01")
    pts = roll(ps, RollingConfig(window_days=252, step_days=20, observable="returns"))
    ann = {a.event.label: a for a in annotate(pts, DEFAULT_EVENTS, ps.dates[0])}
    dot = ann["Dotcom bubble"]
    assert not dot.outside_range
    assert pts[dot.point_index].window_end_date >= date(2000, 3, 10)
    assert pts[dot.point_index - 1].window_end_date < date(2000, 3, 10)
    assert ann["Brexit"].outside_range
    # before the first window end, but after the series start
    assert ann["Japanese asset price bubble"].point_index == 0


def test_annotate_edge_cases(rng):
    pts = roll(series(random_walk(300, rng)), RollingConfig(window_days=252, step_days=10))
    assert annotate(pts, []) == []
    late = annotate(pts, [Event("late", date(2099, 1, 1))])
    assert late[0].outside_range
    early = annotate(pts, [Event("early", date(1980, 1, 1))], series_start="1995-01-02")
    assert early[0].outside_range


def test_read_events():
    ev = read_events("label,date\nA,2001-09-11\nB, 2008-09-15\n")
    assert ev == [Event("A", date(2001, 9, 11)), Event("B", date(2008, 9, 15))]
    with pytest.raises(ValueError):
        read_events("name,when\nA,2001-01-01\n")


def test_estimator(rng):
    ps = series(random_walk(300, rng))
    est = RollingSymmetry(window_days=252, step_days=12)
    assert est.get_params()["step_days"] == 12
    frame = est.fit(ps).to_frame()
    assert len(frame) == len(est.points_) == (300 - 252) // 12 + 1
    assert list(frame.columns)[:3] == ["window_end_date", "n_obs", "status"]


def test_null_rejection_rate():
    # i.i.d. N(0, sigma^2) log-returns, non-overlapping windows
    rng = np.random.default_rng(4242)
    windows, w = 300, 252
    logp = np.concatenate(([0.0], np.cumsum(rng.normal(0.0, 0.01, windows * w))))
    ps = series(100 * np.exp(logp), start="1950-01-02")
    pts = roll(ps, RollingConfig(window_days=w, step_days=w))
    tn0 = np.array([p.tn_at_zero for p in pts])
    rate = np.mean(tn0 >= 2.983)
    assert abs(rate - 0.05) < 0.04
