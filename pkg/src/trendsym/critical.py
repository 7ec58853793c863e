"""Upper percentage points of the symmetry statistic.

Under the symmetric null the statistic converges in law to the Brownian
functional ``I = int_0^1 W(t)^2 / t dt``.  Points are taken from a fixed
table of that law, interpolated inside the table, or estimated by simulating
Brownian paths directly.

Random numbers come from numpy's Philox4x64 counter-based generator.  Path
``i`` of a run seeded with ``seed`` draws from
``Philox(SeedSequence(seed, spawn_key=(i,)))``, so every path is reproducible
on its own regardless of how paths are batched or scheduled.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_alpha, check_probabilities
from .exceptions import OutOfTableRange
from .tn import tn

__all__ = [
    "CriticalTable",
    "CriticalPoint",
    "McConfig",
    "ASYMPTOTIC_TABLE",
    "lookup",
    "critical_value",
    "simulate_functional",
    "simulate_quantile",
    "simulate_finite_sample",
    "simulate_finite_sample_quantile",
    "type7_quantile",
    "path_generator",
]


@dataclass(frozen=True)
class CriticalTable:
    """Cumulative probability -> percentage point of the limiting law."""

    rows: tuple

    def __post_init__(self):
        p = np.array([r[0] for r in self.rows])
        q = np.array([r[1] for r in self.rows])
        if np.any(np.diff(p) <= 0) or np.any(np.diff(q) <= 0):
            raise ValueError("table rows must be strictly increasing")
        if np.any((p <= 0) | (p >= 1)) or np.any(q <= 0):
            raise ValueError("invalid table row")

    @property
    def probabilities(self):
        return np.array([r[0] for r in self.rows])

    @property
    def points(self):
        return np.array([r[1] for r in self.rows])


ASYMPTOTIC_TABLE = CriticalTable(
    (
        (0.50, 0.659),
        (0.75, 1.258),
        (0.85, 1.768),
        (0.90, 2.200),
        (0.95, 2.983),
        (0.975, 3.798),
        (0.990, 4.909),
        (0.995, 5.768),
        (0.999, 7.803),
    )
)


@dataclass(frozen=True)
class CriticalPoint:
    alpha: float
    point: float
    source: str  # "table", "interpolated" or "simulated"
    stderr_estimate: float | None = None

    @property
    def interpolated(self):
        return self.source == "interpolated"

    def __float__(self):
        return self.point


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings for the Brownian functional.

    ``small_t_cut`` defaults to ``1 / time_steps``.
    """

    paths: int = 100_000
    time_steps: int = 4096
    seed: int = 12345
    small_t_cut: float | None = field(default=None)
    batch_paths: int = 512

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError("paths must be >= 1")
        if self.time_steps < 2:
            raise ValueError("time_steps must be >= 2")
        if self.small_t_cut is None:
            object.__setattr__(self, "small_t_cut", 1.0 / self.time_steps)
        if not 0.0 < self.small_t_cut < 1.0:
            raise ValueError("small_t_cut must lie in (0, 1)")
        if self.batch_paths < 1:
            raise ValueError("batch_paths must be >= 1")


def lookup(alpha, table=ASYMPTOTIC_TABLE):
    """Upper ``alpha`` point from the table.

    Probabilities between table rows are interpolated linearly; the result
    then has ``source == "interpolated"``.

    Raises
    ------
    OutOfTableRange
        ``1 - alpha`` lies outside the table's probability span.
    """
    alpha = check_alpha(alpha)
    prob = 1.0 - alpha
    p, q = table.probabilities, table.points
    # tolerate representation error in 1 - alpha, e.g. 1 - 0.05
    hit = np.flatnonzero(np.isclose(p, prob, rtol=0, atol=1e-12))
    if hit.size:
        return CriticalPoint(alpha, float(q[hit[0]]), "table")
    if prob < p[0] or prob > p[-1]:
        raise OutOfTableRange(
            f"cumulative probability {prob:g} outside [{p[0]:g}, {p[-1]:g}]"
        )
    return CriticalPoint(alpha, float(np.interp(prob, p, q)), "interpolated")


def critical_value(alpha, *, simulate=False, config=None):
    """Table point, falling back to simulation outside the table if asked."""
    if simulate:
        config = config or McConfig()
        values = simulate_functional(config)
        point = float(type7_quantile(values, [1.0 - alpha])[0])
        return CriticalPoint(
            alpha, point, "simulated", batch_stderr(values, 1.0 - alpha)
        )
    return lookup(alpha)


def type7_quantile(values, probabilities):
    """Linear interpolation of order statistics (Hyndman-Fan type 7)."""
    return np.quantile(np.asarray(values), probabilities, method="linear")


def batch_stderr(values, probability, n_batches=20):
    """Standard error of a quantile estimate from equal-size batches."""
    values = np.asarray(values)
    size = values.size // n_batches
    if size < 2:
        return None
    qs = [
        type7_quantile(values[b * size : (b + 1) * size], [probability])[0]
        for b in range(n_batches)
    ]
    return float(np.std(qs, ddof=1) / np.sqrt(n_batches))


def path_generator(seed, index):
    """Generator for substream ``index`` of a run seeded with ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def simulate_functional(config):
    """Draw ``config.paths`` realisations of ``int_0^1 W(t)^2 / t dt``.

    On ``[cut, 1]`` the integral is a midpoint sum over ``time_steps`` equal
    cells, with W sampled exactly at the cell midpoints.  The piece on
    ``(0, cut]`` is replaced by its expectation ``cut`` (``E W(t)^2 / t = 1``),
    leaving a zero-mean error of order ``cut``.
    """
    m = config.time_steps
    cut = config.small_t_cut
    h = (1.0 - cut) / m
    mids = cut + h * (np.arange(m) + 0.5)
    # increment variances: first point from W(0) = 0, then cell to cell
    sd = np.full(m, np.sqrt(h))
    sd[0] = np.sqrt(mids[0])
    weights = h / mids

    out = np.empty(config.paths)
    z = np.empty((config.batch_paths, m))
    for start in range(0, config.paths, config.batch_paths):
        stop = min(start + config.batch_paths, config.paths)
        block = z[: stop - start]
        for row, i in enumerate(range(start, stop)):
            path_generator(config.seed, i).standard_normal(out=block[row])
        block *= sd
        np.cumsum(block, axis=1, out=block)
        np.square(block, out=block)
        block *= weights
        # row sums, not a BLAS product, so results do not depend on batch size
        out[start:stop] = cut + block.sum(axis=1)
    return out


def simulate_quantile(probabilities, config=None):
    """Quantiles of the limiting law estimated by path simulation."""
    p = check_probabilities(probabilities)
    values = simulate_functional(config or McConfig())
    return type7_quantile(values, p)


def simulate_finite_sample(n, replications, seed=12345):
    """Statistic over ``replications`` i.i.d. standard normal samples of size ``n``."""
    if n < 10:
        raise ValueError("n must be >= 10")
    out = np.empty(replications)
    for r in range(replications):
        x = path_generator(seed, r).standard_normal(n)
        out[r] = tn(x).statistic
    return out


def simulate_finite_sample_quantile(n, probabilities, replications=10_000, seed=12345):
    p = check_probabilities(probabilities)
    return type7_quantile(simulate_finite_sample(n, replications, seed), p)
