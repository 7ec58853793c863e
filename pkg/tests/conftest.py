import numpy as np
import pandas as pd
import pytest


def yahoo_csv(prices, start="2000-01-03", dates=None):
    """Yahoo-style CSV text for the given close prices."""
    if dates is None:
        dates = pd.bdate_range(start, periods=len(prices)).strftime("%Y-%m-%d")
    lines = ["Date,Open,High,Low,Close,Adj Close,Volume"]
    for d, p in zip(dates, prices):
        lines.append(f"{d},{p},{p},{p},{p},{p},1000")
    return "\n".join(lines) + "\n"


def random_walk(n, rng, drift=3e-4, vol=0.01, start=100.0):
    return start * np.exp(np.cumsum(np.concatenate(([0.0], rng.normal(drift, vol, n - 1)))))


@pytest.fixture
def rng():
    return np.random.default_rng(20170630)


@pytest.fixture
def price_file(tmp_path):
    def make(prices, name="syn.csv", **kw):
        path = tmp_path / name
        path.write_text(yahoo_csv(prices, **kw))
        return path

    return make
