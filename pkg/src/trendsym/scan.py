"""Symmetry interval and most plausible symmetry point.

A point c is plausible at level alpha when the statistic of the shifted
sample ``X - c`` stays below the upper alpha point.  The plausible set is
bracketed on a grid around the sample median.  Its outer edges are then
found exactly among the constant pieces next to the crossing, or by
bisection when there are too many pieces.  The most plausible point is the centre of the lowest plateau
of the statistic inside the interval.

The statistic is a step function of c that only changes at pairwise
midpoints ``(X_i + X_j) / 2``; :func:`exact_breakpoints` lists them so tests
can evaluate the curve exhaustively.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_alpha, check_sample
from .critical import lookup
from .exceptions import InsufficientData, NoSymmetryPoint, TooLarge
from .tn import _curve, _statistic, tn_shifted

__all__ = [
    "GridSpec",
    "TnCurve",
    "SymmetryResult",
    "scan",
    "exact_breakpoints",
    "SymmetryTest",
    "SymmetryPointEstimator",
]


@dataclass(frozen=True)
class GridSpec:
    """Scan grid around the sample median.

    The half-width is ``span * std / sqrt(n)`` unless ``half_width`` is
    given.  While an end point is still plausible the half-width doubles, at
    most ``max_expansions`` times.

    With ``exact_edges`` each end of the plausible set is located exactly
    by evaluating every constant piece in the two cells beyond the last
    plausible grid point, as long as pieces times sample size stays within
    ``edge_budget``.  Otherwise the crossing cell is halved
    ``refine_depth`` times.
    """

    points: int = 2001
    span: float = 30.0
    center: float | None = None
    half_width: float | None = None
    max_expansions: int = 6
    refine_depth: int = 10
    exact_edges: bool = True
    edge_budget: int = 10_000_000

    def __post_init__(self):
        if self.points < 3:
            raise ValueError("grid needs at least 3 points")
        if self.span <= 0:
            raise ValueError("span must be positive")
        if self.half_width is not None and self.half_width <= 0:
            raise ValueError("half_width must be positive")


@dataclass(frozen=True, eq=False)
class TnCurve:
    c_grid: np.ndarray
    tn_values: np.ndarray
    threshold: float

    def to_csv(self):
        lines = ["c,tn,plausible"]
        for c, v in zip(self.c_grid, self.tn_values):
            lines.append(f"{c!r},{'' if np.isnan(v) else repr(float(v))},{int(v < self.threshold)}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class SymmetryResult:
    alpha: float
    threshold: float
    c_min: float
    c_max: float
    c_star: float
    tn_at_c_star: float
    tn_at_zero: float
    zero_symmetric: bool
    curve: TnCurve
    resolution: float
    n: int
    disconnected: bool = False
    components: list = field(default_factory=list)
    expansions: int = 0
    truncated: bool = False
    skipped_points: int = 0

    def to_dict(self, include_curve=False):
        out = {
            "alpha": self.alpha,
            "threshold": self.threshold,
            "n": self.n,
            "c_min": self.c_min,
            "c_max": self.c_max,
            "c_star": self.c_star,
            "tn_at_c_star": self.tn_at_c_star,
            "tn_at_zero": None if np.isnan(self.tn_at_zero) else self.tn_at_zero,
            "zero_symmetric": self.zero_symmetric,
            "resolution": self.resolution,
            "disconnected": self.disconnected,
            "components": [list(c) for c in self.components],
            "expansions": self.expansions,
            "truncated": self.truncated,
            "skipped_points": self.skipped_points,
        }
        if include_curve:
            out["curve"] = {
                "c": self.curve.c_grid.tolist(),
                "tn": [None if np.isnan(v) else float(v) for v in self.curve.tn_values],
            }
        return out


class _Evaluator:
    """Memoised statistic of ``sample - c``; remembers every evaluation."""

    def __init__(self, sample):
        self.sorted = np.sort(sample)
        self.seen = {}

    def many(self, cs):
        vals = _curve(self.sorted, cs)
        self.seen.update(zip(cs.tolist(), vals.tolist()))
        return vals

    def __call__(self, c):
        c = float(c)
        if c not in self.seen:
            self.seen[c] = float(_statistic(self.sorted, c))
        return self.seen[c]

    def table(self, lo=-np.inf, hi=np.inf):
        cs = np.array(sorted(c for c in self.seen if lo <= c <= hi))
        vals = np.array([self.seen[c] for c in cs])
        return cs, vals


def _bisect(f, outside, inside, depth, accept):
    """Shrink [outside, inside] keeping accept(f(inside)) true; returns inside."""
    for _ in range(depth):
        mid = (outside + inside) / 2
        if mid == outside or mid == inside:
            break
        if accept(f(mid)):
            inside = mid
        else:
            outside = mid
    return inside


def _breakpoints_between(s, a, b, cap):
    """Sorted pairwise midpoints of ascending ``s`` lying in ``[a, b]``.

    Returns None when there are more than ``cap`` of them.
    """
    lo = np.maximum(np.searchsorted(s, 2 * a - s, side="left"), np.arange(s.size))
    hi = np.searchsorted(s, 2 * b - s, side="right")
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    if total > cap:
        return None
    i = np.repeat(np.arange(s.size), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    mids = (s[i] + s[lo[i] + offsets]) / 2
    return np.unique(mids[(mids >= a) & (mids <= b)])


def _edge(f, inner, outer, thr, cap):
    """Exact outermost end of the plausible set between two grid points.

    ``inner`` is plausible and ``outer`` lies one or more cells beyond the
    last implausible grid point.  Every constant piece in between is
    evaluated; the result is the outer breakpoint of the outermost plausible
    piece, or None when the window holds too many pieces.
    """
    a, b = min(inner, outer), max(inner, outer)
    bps = _breakpoints_between(f.sorted, a, b, cap)
    if bps is None:
        return None
    edges = np.unique(np.concatenate(([a], bps, [b])))
    vals = f.many((edges[:-1] + edges[1:]) / 2)
    ok = np.flatnonzero(vals < thr)
    if not ok.size:
        return inner
    if outer < inner:
        return float(edges[ok[0]])
    return float(edges[ok[-1] + 1])


def _runs(mask):
    """(start, stop) index pairs of the True runs in a boolean array."""
    padded = np.concatenate(([False], mask, [False])).astype(np.int8)
    edges = np.flatnonzero(np.diff(padded))
    return list(zip(edges[::2], edges[1::2] - 1))


def _unit_grid(points):
    # integer numerators make the grid exactly symmetric about zero
    k = np.arange(points, dtype=np.float64)
    return (2.0 * k - (points - 1)) / (points - 1)


def _lowest_plateau(f, lo, hi, depth, target):
    """Centre of the lowest plateau of f among evaluated points in [lo, hi]."""
    for _ in range(8):
        cs, vals = f.table(lo, hi)
        ok = ~np.isnan(vals)
        cs, vals = cs[ok], vals[ok]
        vmin = vals.min()
        runs = _runs(vals == vmin)
        mids = [(cs[a] + cs[b]) / 2 for a, b in runs]
        a, b = runs[int(np.argmin([abs(m - target) for m in mids]))]
        accept = lambda v: v <= vmin  # noqa: E731
        left = cs[a] if a == 0 else _bisect(f, cs[a - 1], cs[a], depth, accept)
        right = cs[b] if b == cs.size - 1 else _bisect(f, cs[b + 1], cs[b], depth, accept)
        centre = (left + right) / 2
        value = f(centre)
        cs2, vals2 = f.table(lo, hi)
        if np.nanmin(vals2) < vmin:
            continue  # refinement uncovered a lower plateau
        if value == vmin:
            return centre, value
        on_min = cs[vals == vmin]
        best = on_min[np.argmin(np.abs(on_min - centre))]
        return float(best), vmin
    best = cs2[np.nanargmin(vals2)]
    return float(best), float(np.nanmin(vals2))


def scan(sample, alpha=0.05, grid=None, threshold=None):
    """Symmetry interval ``(c_min, c_max)`` and most plausible point.

    Parameters
    ----------
    sample : array_like
    alpha : float
        Significance level; the threshold is the tabulated upper point.
    grid : GridSpec, optional
    threshold : float, optional
        Overrides the tabulated point, e.g. with a simulated one.

    Raises
    ------
    NoSymmetryPoint
        No grid point is plausible.  The exception carries the curve.
    """
    x = check_sample(sample, min_size=2)
    alpha = check_alpha(alpha)
    grid = grid or GridSpec()
    thr = float(threshold) if threshold is not None else lookup(alpha).point
    n = x.size

    center = float(np.median(x)) if grid.center is None else float(grid.center)
    if grid.half_width is not None:
        hw = float(grid.half_width)
    else:
        hw = grid.span * float(np.std(x, ddof=1)) / np.sqrt(n)
        if hw == 0.0:
            hw = max(abs(center), 1.0)
    unit = _unit_grid(grid.points)
    f = _Evaluator(x)

    expansions = 0
    while True:
        c_grid = center + hw * unit
        vals = f.many(c_grid)
        below = vals < thr
        if not (below[0] or below[-1]) or expansions >= grid.max_expansions:
            break
        hw *= 2.0
        expansions += 1
    truncated = bool(below[0] or below[-1])
    curve = TnCurve(c_grid, vals, thr)
    if not below.any():
        raise NoSymmetryPoint(
            f"no plausible symmetry point at alpha={alpha:g} on "
            f"[{c_grid[0]:.6g}, {c_grid[-1]:.6g}]",
            curve=curve,
        )

    runs = _runs(below)
    first, last = runs[0][0], runs[-1][1]
    plausible = lambda v: v < thr  # noqa: E731
    m = c_grid.size - 1
    c_min = c_max = None
    if first == 0:
        c_min = c_grid[0]
    elif grid.exact_edges:
        # pieces narrower than a cell can hide just outside the crossing
        c_min = _edge(f, c_grid[first], c_grid[max(first - 2, 0)], thr, grid.edge_budget // n)
    if c_min is None:
        c_min = _bisect(f, c_grid[first - 1], c_grid[first], grid.refine_depth, plausible)
    if last == m:
        c_max = c_grid[-1]
    elif grid.exact_edges:
        c_max = _edge(f, c_grid[last], c_grid[min(last + 2, m)], thr, grid.edge_budget // n)
    if c_max is None:
        c_max = _bisect(f, c_grid[last + 1], c_grid[last], grid.refine_depth, plausible)
    if c_min <= 0.0 <= c_max:
        f(0.0)  # keeps tn_at_c_star <= tn_at_zero
    c_star, tn_star = _lowest_plateau(
        f, c_min, c_max, grid.refine_depth, (c_min + c_max) / 2
    )

    try:
        tn_zero = tn_shifted(x, 0.0).statistic
    except InsufficientData:
        tn_zero = float("nan")

    step = (c_grid[-1] - c_grid[0]) / (c_grid.size - 1)
    return SymmetryResult(
        alpha=alpha,
        threshold=thr,
        c_min=float(c_min),
        c_max=float(c_max),
        c_star=float(c_star),
        tn_at_c_star=float(tn_star),
        tn_at_zero=float(tn_zero),
        zero_symmetric=bool(tn_zero < thr),
        curve=curve,
        resolution=float(step / 2**grid.refine_depth),
        n=n,
        disconnected=len(runs) > 1,
        components=[(float(c_grid[a]), float(c_grid[b])) for a, b in runs],
        expansions=expansions,
        truncated=truncated,
        skipped_points=int(np.count_nonzero(np.isnan(vals))),
    )


def exact_breakpoints(sample, max_size=2000):
    """Sorted distinct pairwise midpoints ``(X_i + X_j) / 2``, ``i <= j``.

    The statistic of ``sample - c`` is constant in c on each open interval
    between consecutive breakpoints.
    """
    x = check_sample(sample)
    if x.size > max_size:
        raise TooLarge(f"{x.size} points exceed the limit of {max_size}")
    i, j = np.triu_indices(x.size)
    return np.unique((x[i] + x[j]) / 2)


class SymmetryTest(BaseEstimator):
    """Test symmetry of a sample about a fixed point ``c``.

    Attributes
    ----------
    statistic_ : float
    threshold_ : float
    rejected_ : bool
        True when ``statistic_ >= threshold_``.
    """

    def __init__(self, alpha=0.05, c=0.0, threshold=None):
        self.alpha = alpha
        self.c = c
        self.threshold = threshold

    def fit(self, X, y=None):
        x = check_sample(X, min_size=2)
        value = tn_shifted(x, self.c)
        self.statistic_ = value.statistic
        self.n_effective_ = value.n_effective
        self.zeros_dropped_ = value.zeros_dropped
        if self.threshold is not None:
            self.threshold_ = float(self.threshold)
        else:
            self.threshold_ = lookup(self.alpha).point
        self.rejected_ = bool(self.statistic_ >= self.threshold_)
        return self


class SymmetryPointEstimator(TransformerMixin, BaseEstimator):
    """Estimate the symmetry interval and most plausible symmetry point.

    ``transform`` recentres a sample on the fitted point.

    Parameters
    ----------
    alpha : float, default=0.05
    grid_points : int, default=2001
    grid_span : float, default=30.0
        Initial half-width of the grid in units of ``std / sqrt(n)``.
    max_expansions : int, default=6
    refine_depth : int, default=10
    threshold : float, optional
        Replaces the tabulated critical value.

    Attributes
    ----------
    result_ : SymmetryResult
    c_min_, c_max_, c_star_ : float
    zero_symmetric_ : bool
    """

    def __init__(
        self,
        alpha=0.05,
        grid_points=2001,
        grid_span=30.0,
        max_expansions=6,
        refine_depth=10,
        threshold=None,
    ):
        self.alpha = alpha
        self.grid_points = grid_points
        self.grid_span = grid_span
        self.max_expansions = max_expansions
        self.refine_depth = refine_depth
        self.threshold = threshold

    def fit(self, X, y=None):
        grid = GridSpec(
            points=self.grid_points,
            span=self.grid_span,
            max_expansions=self.max_expansions,
            refine_depth=self.refine_depth,
        )
        self.result_ = scan(X, self.alpha, grid, self.threshold)
        self.c_min_ = self.result_.c_min
        self.c_max_ = self.result_.c_max
        self.c_star_ = self.result_.c_star
        self.zero_symmetric_ = self.result_.zero_symmetric
        return self

    def transform(self, X):
        check_is_fitted(self, "c_star_")
        return check_sample(X) - self.c_star_
