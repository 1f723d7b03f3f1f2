"""Metrics on paths, coalescing pairs, and finite pair sets.

Four layers, each building on the previous:

- ``path_distance``: |t0 - s0| joined with a 2^-n weighted series of capped
  sups of the hat-extended difference over [0, n].  Exact for
  piecewise-linear paths because sups are taken over the union of both
  grids' breakpoints plus the interval endpoints.
- ``pair_distance``: Hausdorff distance between the two-element path sets of
  two coalescing pairs under ``path_distance``.
- ``profile_distance``: 2^-n weighted series over n >= 2 of capped sups of
  |1/p - 1/q| between standardised gap profiles over [1/n, 1 - 1/n].  Sups
  are evaluated on a fixed uniform grid shared by every call with the same
  parameters, which keeps the triangle inequality exact at machine
  precision.  Degenerate profiles standardise to the tent over [0, 1] and
  enter through the same formula, so pairs whose gap shrinks away converge
  to the diagonal.
- ``coalescing_distance``: pair_distance + profile_distance, the complete
  metric on coalescing pairs; ``hausdorff_distance`` lifts it to finite pair
  sets.

``profile_distance_bound`` is the closed-form bound on profile_distance for
profiles whose dimension (max of length and diameter) is at most sigma; it
vanishes as sigma -> 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptySet, QueryBeyondHorizon
from .paths import CoalescingPair, PairSet, Path
from .profiles import StandardProfile, standard_profile_of

__all__ = [
    "MetricParams",
    "path_distance",
    "pair_distance",
    "profile_distance",
    "coalescing_distance",
    "hausdorff_distance",
    "profile_distance_bound",
    "PathDistanceEngine",
]


@dataclass(frozen=True)
class MetricParams:
    """Truncation orders shared by all metric evaluations.

    n_max caps both weighted series, with tail error below 2^-n_max;
    grid_m is the number of uniform sup-evaluation points per interval of
    the profile series.
    """

    n_max: int = 24
    grid_m: int = 512

    def __post_init__(self) -> None:
        if self.n_max < 2:
            raise DomainError("n_max must be at least 2")
        if self.grid_m < 2:
            raise DomainError("grid_m must be at least 2")


DEFAULT_PARAMS = MetricParams()

_WEIGHTS_CACHE: dict[int, np.ndarray] = {}
_EVAL_GRID_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _weights(n_max: int) -> np.ndarray:
    w = _WEIGHTS_CACHE.get(n_max)
    if w is None:
        w = 2.0 ** -np.arange(1, n_max + 1)
        _WEIGHTS_CACHE[n_max] = w
    return w


def _eval_grid(n_max: int, grid_m: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Shared sup grid for the profile series.

    Returns the union of the per-interval uniform grids plus, per interval,
    the indices of its own grid_m points.  Each interval's sup set depends
    only on (n, grid_m), never on n_max, so truncation is monotone and the
    triangle inequality is exact across calls.
    """
    key = (n_max, grid_m)
    cached = _EVAL_GRID_CACHE.get(key)
    if cached is None:
        pieces = [np.linspace(1.0 / n, 1.0 - 1.0 / n, grid_m)
                  for n in range(2, n_max + 1)]
        points, inverse = np.unique(np.concatenate(pieces), return_inverse=True)
        idx = []
        at = 0
        for piece in pieces:
            idx.append(inverse[at:at + len(piece)].copy())
            at += len(piece)
        cached = (points, idx)
        _EVAL_GRID_CACHE[key] = cached
    return cached


# ---------------------------------------------------------------------------
# path metric


def _sup_series(breaks: np.ndarray, diff: np.ndarray, end: float, n_max: int) -> float:
    """Sum of 2^-n * (sup over [0, n] of |diff| ^ 1) from the running max."""
    running = np.maximum.accumulate(np.abs(diff))
    total = 0.0
    for n in range(1, n_max + 1):
        if n >= end:
            sup = running[-1]
        else:
            idx = np.searchsorted(breaks, float(n), side="right") - 1
            sup = running[idx]
        total += 2.0 ** -n * min(float(sup), 1.0)
    return total


def path_distance(f: Path, g: Path, n_max: int = 24) -> float:
    """Sup-type metric between two paths with hat extension.

    |t0 - s0| joined with sum over n of 2^-n (sup over [0, n] |f - g| ^ 1);
    truncation error of the series is below 2^-n_max.
    """
    if n_max < 1:
        raise DomainError("n_max must be at least 1")
    end = max(f.end_time, g.end_time)
    if end < n_max and not (f.frozen and g.frozen):
        raise QueryBeyondHorizon("series needs values beyond the grid of an unfrozen path")
    ints = np.arange(1.0, n_max + 1.0)
    pieces = [np.array([0.0]), f.grid_times(), g.grid_times(), ints[ints <= end]]
    breaks = np.unique(np.concatenate(pieces))
    breaks = breaks[(breaks >= 0.0) & (breaks <= n_max)]
    diff = f.values_at(breaks) - g.values_at(breaks)
    series = _sup_series(breaks, diff, end, n_max)
    return max(abs(f.t0 - g.t0), series)


class PathDistanceEngine:
    """Batched path_distance over two path collections on a shared grid."""

    def __init__(self, paths_a: list[Path], paths_b: list[Path], n_max: int = 24):
        self.n_max = n_max
        end = max(max(p.end_time for p in paths_a), max(p.end_time for p in paths_b))
        self.end = end
        if end < n_max and not all(p.frozen for p in paths_a + paths_b):
            raise QueryBeyondHorizon("series needs values beyond the grid of an unfrozen path")
        ints = np.arange(1.0, n_max + 1.0)
        pieces = [np.array([0.0]), ints[ints <= end]]
        pieces += [p.grid_times() for p in paths_a]
        pieces += [p.grid_times() for p in paths_b]
        breaks = np.unique(np.concatenate(pieces))
        self.breaks = breaks[(breaks >= 0.0) & (breaks <= n_max)]
        self.va = np.vstack([p.values_at(self.breaks) for p in paths_a])
        self.vb = np.vstack([p.values_at(self.breaks) for p in paths_b])
        self.t0a = np.array([p.t0 for p in paths_a])
        self.t0b = np.array([p.t0 for p in paths_b])
        ns = np.arange(1, n_max + 1, dtype=float)
        inside = ns < end
        self._idx = np.searchsorted(self.breaks, ns[inside], side="right") - 1
        self._n_inside = int(inside.sum())
        self._w = _weights(n_max)

    def row(self, i: int) -> np.ndarray:
        """path_distance from a-path i to every b-path."""
        running = np.maximum.accumulate(np.abs(self.va[i] - self.vb), axis=1)
        sups = np.empty((len(self.vb), self.n_max))
        sups[:, : self._n_inside] = running[:, self._idx]
        sups[:, self._n_inside:] = running[:, -1:]
        series = (self._w * np.minimum(sups, 1.0)).sum(axis=1)
        return np.maximum(np.abs(self.t0a[i] - self.t0b), series)

    def matrix(self) -> np.ndarray:
        return np.vstack([self.row(i) for i in range(len(self.va))])


# ---------------------------------------------------------------------------
# pair metric


def _two_set_hausdorff(d11: float, d12: float, d21: float, d22: float) -> float:
    forward = max(min(d11, d12), min(d21, d22))
    backward = max(min(d11, d21), min(d12, d22))
    return max(forward, backward)


def pair_distance(a: CoalescingPair, b: CoalescingPair, n_max: int = 24) -> float:
    """Hausdorff distance between the path sets {left, right} of two pairs."""
    return _two_set_hausdorff(
        path_distance(a.left, b.left, n_max),
        path_distance(a.left, b.right, n_max),
        path_distance(a.right, b.left, n_max),
        path_distance(a.right, b.right, n_max),
    )


def pair_distance_matrix(path_matrix: np.ndarray, idx_a: np.ndarray,
                         idx_b: np.ndarray) -> np.ndarray:
    """pair_distance for every cross pair from a precomputed path matrix.

    idx_a/idx_b hold (left, right) path indices per pair, rows into the
    matrix axes.
    """
    d11 = path_matrix[idx_a[:, 0][:, None], idx_b[:, 0][None, :]]
    d12 = path_matrix[idx_a[:, 0][:, None], idx_b[:, 1][None, :]]
    d21 = path_matrix[idx_a[:, 1][:, None], idx_b[:, 0][None, :]]
    d22 = path_matrix[idx_a[:, 1][:, None], idx_b[:, 1][None, :]]
    forward = np.maximum(np.minimum(d11, d12), np.minimum(d21, d22))
    backward = np.maximum(np.minimum(d11, d21), np.minimum(d12, d22))
    return np.maximum(forward, backward)


# ---------------------------------------------------------------------------
# profile metric


def profile_distance(p: StandardProfile, q: StandardProfile,
                     params: MetricParams = DEFAULT_PARAMS) -> float:
    """Capped weighted sups of |1/p - 1/q| over nested interior intervals.

    Evaluated on the fixed uniform grid shared by every call with the same
    params, so the triangle inequality holds exactly.  Degenerate profiles
    take part through their tent standardisation like any other profile.
    """
    points, idx = _eval_grid(params.n_max, params.grid_m)
    key = (params.n_max, params.grid_m)
    d = np.abs(p.reciprocals(points, key) - q.reciprocals(points, key))
    d = np.nan_to_num(d, nan=0.0, posinf=np.inf)
    total = 0.0
    for k in range(len(idx)):
        sup = float(d[idx[k]].max())
        total += 2.0 ** -(k + 2) * min(sup, 1.0)
    return total


def profile_distance_matrix(profiles: list[StandardProfile],
                            params: MetricParams = DEFAULT_PARAMS) -> np.ndarray:
    """All pairwise profile distances, sharing reciprocal vectors.

    Matches profile_distance entry by entry; quadratic in the profile
    count, linear in the evaluation grid.
    """
    points, idx = _eval_grid(params.n_max, params.grid_m)
    key = (params.n_max, params.grid_m)
    expanded = np.concatenate(idx)
    starts = np.cumsum([0] + [len(ix) for ix in idx[:-1]])
    w = 2.0 ** -np.arange(2, params.n_max + 1)
    r = np.vstack([p.reciprocals(points, key) for p in profiles])[:, expanded]
    n = len(profiles)
    out = np.zeros((n, n))
    for i in range(n):
        d = np.abs(r[i] - r[i:])
        sups = np.maximum.reduceat(d, starts, axis=1)
        row = (w * np.minimum(sups, 1.0)).sum(axis=1)
        out[i, i:] = row
        out[i:, i] = row
    return out


def profile_distance_bound(sigma: float) -> float:
    """Closed-form bound on profile_distance for profiles of dimension <= sigma.

    2 sigma / (sigma^(2/3) - sigma^2) plus the geometric tail over
    n >= sigma^(-1/3); decreasing, and vanishing as sigma -> 0.
    """
    if not 0.0 < sigma <= 0.5:
        raise DomainError(f"sigma must lie in (0, 1/2], got {sigma}")
    lead = 2.0 * sigma / (sigma ** (2.0 / 3.0) - sigma ** 2)
    first_n = math.ceil(sigma ** (-1.0 / 3.0) - 1e-9)
    return lead + 2.0 ** (1 - first_n)


# ---------------------------------------------------------------------------
# combined metric and Hausdorff lift


def coalescing_distance(a: CoalescingPair, b: CoalescingPair,
                        params: MetricParams = DEFAULT_PARAMS) -> float:
    """pair_distance plus profile_distance: the complete pair metric."""
    bar = pair_distance(a, b, params.n_max)
    return bar + profile_distance(standard_profile_of(a), standard_profile_of(b), params)


def _collect_paths(pairs: list[CoalescingPair]) -> tuple[list[Path], np.ndarray]:
    paths: list[Path] = []
    seen: dict[int, int] = {}
    idx = np.empty((len(pairs), 2), dtype=int)
    for k, pr in enumerate(pairs):
        for col, p in enumerate((pr.left, pr.right)):
            j = seen.get(id(p))
            if j is None:
                j = len(paths)
                seen[id(p)] = j
                paths.append(p)
            idx[k, col] = j
    return paths, idx


def _expanded_reciprocals(profiles: list[StandardProfile],
                          params: MetricParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reciprocal values on the evaluation grid, repeated per interval so a
    single maximum.reduceat yields every interval sup."""
    points, idx = _eval_grid(params.n_max, params.grid_m)
    key = (params.n_max, params.grid_m)
    expanded = np.concatenate(idx)
    starts = np.cumsum([0] + [len(ix) for ix in idx[:-1]])
    r = np.vstack([p.reciprocals(points, key) for p in profiles])[:, expanded]
    w = 2.0 ** -np.arange(2, params.n_max + 1)
    return r, starts, w


def _directed_sup_min(pairs_a: list[CoalescingPair], pairs_b: list[CoalescingPair],
                      bar: np.ndarray, params: MetricParams,
                      hints: np.ndarray | None) -> float:
    """max over a of min over b of coalescing_distance, exactly.

    Rows are evaluated in full with batched profile sups; with hints, a row
    whose hinted distance cannot exceed the running maximum is skipped,
    which never changes the value (its min is at most the hinted distance).
    """
    std_a = [standard_profile_of(p) for p in pairs_a]
    std_b = [standard_profile_of(p) for p in pairs_b]
    ra, starts, w = _expanded_reciprocals(std_a, params)
    rb, _, _ = _expanded_reciprocals(std_b, params)

    def delta_row(a: int, rows: np.ndarray | slice = slice(None)) -> np.ndarray:
        d = np.abs(rb[rows] - ra[a])
        sups = np.maximum.reduceat(d, starts, axis=1)
        return (w * np.minimum(sups, 1.0)).sum(axis=1)

    if hints is not None:
        h = np.asarray(hints, dtype=int)
        d = np.abs(rb[h] - ra)
        sups = np.maximum.reduceat(d, starts, axis=1)
        ub = bar[np.arange(len(pairs_a)), h] + (w * np.minimum(sups, 1.0)).sum(axis=1)
        order = np.argsort(-ub)
    else:
        ub = None
        order = np.argsort(-bar.min(axis=1))
    best_overall = 0.0
    for a in order:
        if ub is not None and ub[a] <= best_overall:
            continue
        best_overall = max(best_overall, float((bar[a] + delta_row(a)).min()))
    return best_overall


def hausdorff_distance(K: PairSet, K2: PairSet,
                       params: MetricParams = DEFAULT_PARAMS,
                       hints_ab: np.ndarray | None = None,
                       hints_ba: np.ndarray | None = None) -> float:
    """Hausdorff distance between finite pair sets under coalescing_distance.

    Exact double sup-min; the internal pruning is value-preserving, so the
    result matches the unpruned loop bit for bit.  Optional hints give, per
    pair, the index of a likely nearest pair on the other side and only
    speed up the pruning.
    """
    if isinstance(K, PairSet):
        K.require_nonempty()
    if isinstance(K2, PairSet):
        K2.require_nonempty()
    pairs_a, pairs_b = list(K), list(K2)
    if not pairs_a or not pairs_b:
        raise EmptySet("hausdorff_distance requires non-empty sets")
    paths_a, idx_a = _collect_paths(pairs_a)
    paths_b, idx_b = _collect_paths(pairs_b)
    m = PathDistanceEngine(paths_a, paths_b, params.n_max).matrix()
    bar = pair_distance_matrix(m, idx_a, idx_b)
    d_ab = _directed_sup_min(pairs_a, pairs_b, bar, params, hints_ab)
    d_ba = _directed_sup_min(pairs_b, pairs_a, bar.T, params, hints_ba)
    return max(d_ab, d_ba)
