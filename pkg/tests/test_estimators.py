import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline

from conftest import random_walk
from trendsym.observables import ObservableTransformer
from trendsym.rolling import RollingSymmetry
from trendsym.scan import SymmetryPointEstimator, SymmetryTest


@pytest.mark.parametrize(
    "est",
    [
        ObservableTransformer("tvreturns"),
        SymmetryTest(alpha=0.01, c=0.2),
        SymmetryPointEstimator(alpha=0.1, grid_points=301),
        RollingSymmetry(window_days=100, step_days=5),
    ],
)
def test_params_round_trip(est):
    params = est.get_params()
    twin = clone(est)
    assert twin.get_params() == params
    assert twin is not est
    twin.set_params(**params)
    assert twin.get_params() == params


def test_bad_kind():
    with pytest.raises(ValueError):
        ObservableTransformer("volume").fit()


def test_transformer_feeds_estimator(rng):
    from trendsym.ingest import PriceSeries

    prices = random_walk(500, rng)
    dates = np.datetime64("2001-01-01") + np.arange(500)
    ps = PriceSeries(dates, prices, "X")
    obs = ObservableTransformer("returns").fit().transform(ps)
    np.testing.assert_allclose(obs, np.diff(np.log(prices)), rtol=0, atol=1e-15)
    est = SymmetryPointEstimator(grid_points=401).fit(obs)
    assert est.c_min_ <= est.c_star_ <= est.c_max_


def test_symmetry_point_in_pipeline(rng):
    x = rng.normal(1.0, 1.0, 400)
    pipe = make_pipeline(SymmetryPointEstimator(grid_points=401))
    centred = pipe.fit_transform(x)
    assert abs(np.median(centred)) < 0.2
