import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trendsym.exceptions import EmptySeries, InsufficientData
from trendsym.observables import (
    ObservableSeries,
    ObservableTransformer,
    build_observable,
    daily_returns,
    density_profile,
    describe,
    segment_trends,
    trend_returns,
)


def scan_runs(prices):
    """Oracle: direct scan of consecutive differences into runs."""
    runs = []
    for i in range(len(prices) - 1):
        up = prices[i + 1] > prices[i]
        if runs and runs[-1][2] == up:
            runs[-1][1] += 1
        else:
            runs.append([i, 1, up])
    return [(s, k, "up" if u else "down", math.log(prices[s + k] / prices[s])) for s, k, u in runs]


prices_strategy = st.lists(
    st.sampled_from([1.0, 1.5, 2.0, 2.5, 3.0, 7.25, 100.0]), min_size=2, max_size=80
)


def test_flat_returns():
    assert daily_returns([100, 100]).values.tolist() == [0.0]


def test_exact_log_returns():
    np.testing.assert_allclose(daily_returns([1, math.e, math.e**2]).values, [1.0, 1.0], rtol=0, atol=1e-15)


def test_returns_length_and_no_meta():
    obs = daily_returns([1, 2, 3, 4])
    assert len(obs) == 3 and not obs.has_meta


def test_monotone_single_uptrend():
    (trend,) = segment_trends([1, 2, 3])
    assert (trend.start_index, trend.duration, trend.direction) == (0, 2, "up")
    assert trend.log_change == pytest.approx(math.log(3), abs=1e-15)


def test_hand_worked_series():
    prices = [100, 101, 103, 102, 102, 105]
    trends = segment_trends(prices)
    expected = scan_runs(prices)
    assert [(t.start_index, t.duration, t.direction) for t in trends] == [e[:3] for e in expected]
    assert [(t.duration, t.direction) for t in trends] == [(2, "up"), (2, "down"), (1, "up")]
    np.testing.assert_allclose(
        [t.log_change for t in trends],
        [math.log(103 / 100), math.log(102 / 103), math.log(105 / 102)],
        rtol=0,
        atol=1e-15,
    )
    tr = trend_returns(trends, "treturns")
    assert math.fsum(tr.values) == pytest.approx(math.log(105 / 100), abs=1e-15)


def test_trend_return_kinds():
    trends = segment_trends([1, 2, 3])
    assert trend_returns(trends, "treturns").values[0] == pytest.approx(math.log(3))
    assert trend_returns(trends, "tvreturns").values[0] == pytest.approx(math.log(3) / 2)
    with pytest.raises(EmptySeries):
        trend_returns([], "treturns")


def test_zero_change_joins_down_trend():
    trends = segment_trends([5, 5, 5, 6])
    assert [(t.direction, t.duration) for t in trends] == [("down", 2), ("up", 1)]
    assert trends[0].log_change == 0.0


def test_build_matches_trend_route(rng):
    prices = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, 500)))
    for kind in ("treturns", "tvreturns"):
        assert build_observable(prices, kind) == trend_returns(segment_trends(prices), kind)


def test_empty_series_errors():
    with pytest.raises(EmptySeries):
        daily_returns([100])
    with pytest.raises(EmptySeries):
        segment_trends([100])


@settings(max_examples=200, deadline=None)
@given(prices_strategy)
def test_trend_invariants(prices):
    prices = np.array(prices)
    trends = segment_trends(prices)
    oracle = scan_runs(prices)
    assert [(t.start_index, t.duration, t.direction) for t in trends] == [o[:3] for o in oracle]
    # tiling
    assert trends[0].start_index == 0 and trends[-1].end_index == len(prices) - 1
    for a, b in zip(trends, trends[1:]):
        assert a.end_index == b.start_index
        assert a.direction != b.direction
    assert sum(t.duration for t in trends) == len(prices) - 1
    ups = sum(t.direction == "up" for t in trends)
    assert abs(ups - (len(trends) - ups)) <= 1
    # direction semantics on every span
    for t in trends:
        seg = np.diff(prices[t.start_index : t.end_index + 1])
        assert np.all(seg > 0) if t.direction == "up" else np.all(seg <= 0)
    tr = trend_returns(trends, "treturns")
    tv = trend_returns(trends, "tvreturns")
    assert np.all(tr.values[tr.up] > 0) and np.all(tr.values[~tr.up] <= 0)
    assert np.all(tv.values[tv.up] > 0) and np.all(tv.values[~tv.up] <= 0)
    assert abs(math.fsum(tr.values) - math.log(prices[-1] / prices[0])) < 1e-12
    r = daily_returns(prices).values
    for t, v in zip(trends, tr.values):
        assert abs(math.fsum(r[t.start_index : t.end_index]) - v) < 1e-12
    assert np.all(np.abs(tv.values) <= np.abs(tr.values))
    one = tr.duration == 1
    np.testing.assert_array_equal(np.abs(tv.values[~one]) < np.abs(tr.values[~one]), tr.values[~one] != 0)
    np.testing.assert_array_equal(tr.values[one], r[tr.start_index[one]])
    np.testing.assert_array_equal(tv.values[one], tr.values[one])


def test_describe_examples():
    d = describe(ObservableSeries("returns", np.array([-1.0, 1.0])))
    assert d.mean == 0 and d.skewness == 0
    assert describe(np.array([0.0, 0, 0, 4])).mean == 1
    with pytest.raises(InsufficientData):
        describe(np.array([1.0]))


def test_describe_conventions():
    x = np.array([1.0, 2.0, 4.0, 8.0, 9.0])
    d = describe(x)
    m = x.mean()
    m2, m3, m4 = (np.mean((x - m) ** k) for k in (2, 3, 4))
    assert d.std == pytest.approx(np.sqrt(np.sum((x - m) ** 2) / 4))
    assert d.skewness == pytest.approx(m3 / m2**1.5)
    assert d.kurtosis == pytest.approx(m4 / m2**2)  # Pearson, not excess
    assert d.sem == pytest.approx(d.std / np.sqrt(5))


def test_density_bimodal_mixture(rng):
    n = 10_000
    x = np.where(rng.random(n) < 0.5, -1.0, 1.0) + rng.normal(0, 0.1, n)
    prof = density_profile(x)
    assert len(prof.modes) == 2
    locs = sorted(m[0] for m in prof.modes)
    # maxima of the analytic mixture sit at +-1 (components are well separated)
    assert locs[0] == pytest.approx(-1.0, abs=0.05)
    assert locs[1] == pytest.approx(1.0, abs=0.05)
    assert 1.0 <= prof.peak_ratio < 1.1
    assert np.trapezoid(prof.density, prof.grid) == pytest.approx(1.0, abs=1e-6)
    assert prof.grid.size == 512
    h = prof.bandwidth
    assert prof.grid[0] == pytest.approx(x.min() - 3 * h)
    assert prof.grid[-1] == pytest.approx(x.max() + 3 * h)


def test_density_peak_ratio_tends_to_one(rng):
    ratios = []
    for n in (2_000, 50_000):
        x = np.where(rng.random(n) < 0.5, -1.0, 1.0) + rng.normal(0, 0.1, n)
        ratios.append(density_profile(x).peak_ratio)
    assert ratios[1] - 1 < 0.03


def test_density_unimodal_normal(rng):
    prof = density_profile(rng.normal(size=10_000))
    assert len(prof.modes) == 1
    assert prof.peak_ratio is None
    assert prof.modes[0][0] == pytest.approx(0.0, abs=0.1)


def test_density_needs_ten_points():
    with pytest.raises(InsufficientData):
        density_profile(np.arange(9.0))


def test_serialization_round_trip(rng):
    prices = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, 100)))
    for kind in ("returns", "treturns", "tvreturns"):
        obs = build_observable(prices, kind)
        assert ObservableSeries.from_json(obs.to_json()) == obs
        assert ObservableSeries.from_csv(obs.to_csv(), kind) == obs
    header, first = build_observable(prices, "returns").to_csv().splitlines()[:2]
    assert header == "index,value,start_index,duration,direction"
    assert first.endswith(",,,")


def test_transformer(rng):
    prices = 100 * np.exp(np.cumsum(rng.normal(0, 0.01, 50)))
    t = ObservableTransformer("tvreturns")
    out = t.fit_transform(prices)
    np.testing.assert_array_equal(out, build_observable(prices, "tvreturns").values)
    assert t.get_params() == {"kind": "tvreturns"}
    with pytest.raises(ValueError):
        ObservableTransformer("volume").fit(prices)
