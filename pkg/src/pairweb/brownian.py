"""Coalescing Brownian motions from finitely many starting points.

Paths take exact Gaussian increments on a uniform step grid.  Within a step
two adjacent paths may cross without the endpoint gaps showing it, so after
every step adjacent paths merge with the first-passage probability of the
gap bridge; they also merge whenever the endpoint order inverts.  The gap of
two independent unit-diffusion motions is a Brownian motion with variance 2
per unit time, so a bridge with endpoint gaps a, b over a step of length h
hits zero with probability exp(-2ab / (2h)) = exp(-a b / h).

Merged paths share one suffix (the left cluster's continuation) and the
merge time is recorded at the end of the step, which biases coalescence
times upward by at most one step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .paths import CoalescingPair, PairSet, Path

__all__ = [
    "EnsembleConfig",
    "bridge_cross_prob",
    "sample_coalescing_ensemble",
    "build_brownian_segment",
    "pair_survival_times",
]


def bridge_cross_prob(a: float, b: float, h: float) -> float:
    """Probability that the gap bridge from a to b hits 0 within a step h.

    The gap diffuses with variance 2 per unit time, giving exp(-a b / h);
    already-touching endpoints cross surely.
    """
    if a < 0 or b < 0:
        raise DomainError("endpoint gaps must be nonnegative")
    if h <= 0:
        raise DomainError("step length must be positive")
    if a == 0.0 or b == 0.0:
        return 1.0
    return min(math.exp(-a * b / h), 1.0)


@dataclass(frozen=True)
class EnsembleConfig:
    """Starting points and discretisation of one coalescing ensemble.

    starts holds (position, time) points in [-1, 1] x [0, 1]; start times
    are snapped to the step grid.
    """

    starts: tuple
    step_h: float = 0.01
    horizon: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.step_h <= 0:
            raise DomainError("step_h must be positive")
        if not self.starts:
            raise DomainError("at least one starting point is required")
        for x, t in self.starts:
            if not -1.0 <= x <= 1.0:
                raise DomainError(f"start position {x} outside [-1, 1]")
            if not 0.0 <= t <= 1.0:
                raise DomainError(f"start time {t} outside [0, 1]")
            if t > self.horizon:
                raise DomainError("start time beyond the horizon")


class _Cluster:
    __slots__ = ("pos", "members")

    def __init__(self, pos: float, members: list[int]):
        self.pos = pos
        self.members = members


def sample_coalescing_ensemble(config: EnsembleConfig) -> PairSet:
    """Simulate the ensemble and return all ordered path pairs.

    Paths are inserted into the ordered state at their (snapped) start
    times; once two paths meet they share every later value.  The output
    contains m (m + 1) / 2 ordered pairs for m starts, with coalescence
    times read from the merge records.
    """
    h = config.step_h
    n_steps = int(round(config.horizon / h))
    m = len(config.starts)
    start_step = np.array([int(round(t / h)) for _, t in config.starts])
    order = np.lexsort((np.array([x for x, _ in config.starts]), start_step))
    values = np.full((m, n_steps + 1), np.nan)
    merge_step = np.full((m, m), -1, dtype=np.int64)  # -1: never merged
    rng = np.random.default_rng(config.seed)

    clusters: list[_Cluster] = []

    def record_merge(a: _Cluster, b: _Cluster, k: int) -> None:
        for i in a.members:
            for j in b.members:
                merge_step[i, j] = merge_step[j, i] = k

    by_step: dict[int, list[int]] = {}
    for oi in order:
        by_step.setdefault(int(start_step[oi]), []).append(int(oi))

    first = int(start_step.min())
    for k in range(first, n_steps + 1):
        for oi in by_step.get(k, ()):  # insertions, left to right
            x = float(config.starts[oi][0])
            at = next((c for c in clusters if c.pos == x), None)
            if at is not None:
                record_merge(at, _Cluster(x, [oi]), k)
                at.members.append(oi)
            else:
                j = next((n for n, c in enumerate(clusters) if c.pos > x),
                         len(clusters))
                clusters.insert(j, _Cluster(x, [oi]))
        for c in clusters:
            for i in c.members:
                if k >= start_step[i]:
                    values[i, k] = c.pos
        if k == n_steps:
            break
        if not clusters:
            continue
        z = rng.standard_normal(len(clusters))
        prop = np.array([c.pos for c in clusters]) + math.sqrt(h) * z
        # fold out inversions: a cluster overtaking its left neighbour joins
        # it and the blob keeps the left continuation, so at most one merge
        # fires per incoming cluster and order stays intact
        # entries: [cluster, new pos, left face (pre-step), right face]
        merged: list[list] = []
        for c, p in zip(clusters, prop):
            if merged and merged[-1][1] >= p:
                record_merge(merged[-1][0], c, k + 1)
                merged[-1][0].members.extend(c.members)
                merged[-1][3] = c.pos
            else:
                merged.append([c, float(p), c.pos, c.pos])
        # bridge crossings between surviving neighbours
        u = rng.random(len(merged) - 1) if len(merged) > 1 else np.empty(0)
        survivors: list[_Cluster] = []
        prev_rface = 0.0
        for n, (c, p, lface, rface) in enumerate(merged):
            if n > 0:
                gap_before = max(lface - prev_rface, 0.0)
                gap_after = max(p - survivors[-1].pos, 0.0)
                if u[n - 1] < bridge_cross_prob(gap_before, gap_after, h):
                    record_merge(survivors[-1], c, k + 1)
                    survivors[-1].members.extend(c.members)
                    prev_rface = rface
                    continue
            survivors.append(_Cluster(float(p), c.members))
            prev_rface = rface
        clusters = survivors

    step_times = h * np.arange(n_steps + 1)
    paths = []
    for i in range(m):
        s = int(start_step[i])
        paths.append(Path(t0=float(step_times[s]), step=h,
                          values=values[i, s:], frozen_after=n_steps - s))
    pairs = []
    for a in range(m):
        for b in range(a, m):
            pairs.append(_ensemble_pair(paths, values, start_step, merge_step,
                                        h, a, b))
    return PairSet(pairs, meta={"kind": "brownian", "paths": paths,
                                "merge_step": merge_step,
                                "start_step": start_step,
                                "config": config})


def _ensemble_pair(paths, values, start_step, merge_step, h, a, b) -> CoalescingPair:
    k_plus = int(max(start_step[a], start_step[b]))
    t_plus = h * k_plus
    if a == b or merge_step[a, b] == k_plus:
        return CoalescingPair(paths[a], paths[b], t_plus=t_plus, t_coal=t_plus)
    ms = int(merge_step[a, b])
    t_coal = math.inf if ms < 0 else h * ms
    if values[a, k_plus] <= values[b, k_plus]:
        left, right = paths[a], paths[b]
    else:
        left, right = paths[b], paths[a]
    return CoalescingPair(left, right, t_plus=t_plus, t_coal=t_coal)


def build_brownian_segment(alpha: float, spacing: float,
                           config: EnsembleConfig) -> PairSet:
    """Ensemble started from {0} x {0, spacing, 2 spacing, ... <= alpha}.

    Later starts are inserted into the ordered ensemble at their start
    times; config.starts is ignored and replaced by the segment points.
    """
    if not 0.0 <= alpha < 1.0:
        raise DomainError("alpha must lie in [0, 1)")
    if spacing <= 0:
        raise DomainError("spacing must be positive")
    ks = range(int(math.floor(alpha / spacing + 1e-9)) + 1)
    starts = tuple((0.0, k * spacing) for k in ks)
    cfg = EnsembleConfig(starts=starts, step_h=config.step_h,
                         horizon=config.horizon, seed=config.seed)
    out = sample_coalescing_ensemble(cfg)
    out.meta["alpha"] = alpha
    out.meta["spacing"] = spacing
    return out


def pair_survival_times(gap0: float, h: float, horizon: float, reps: int,
                        seed: int) -> np.ndarray:
    """Coalescence times of many independent two-path ensembles at once.

    The gap takes increments of variance 2h per step with the bridge
    correction; times are recorded at step ends, inf when the pair is still
    apart at the horizon.  This is the replicated-law driver behind the
    coalescence-law checks.
    """
    if gap0 <= 0 or h <= 0 or horizon <= 0 or reps < 1:
        raise DomainError("gap0, h, horizon must be positive and reps >= 1")
    n_steps = int(round(horizon / h))
    rng = np.random.default_rng(seed)
    gap = np.full(reps, float(gap0))
    times = np.full(reps, math.inf)
    alive = np.ones(reps, dtype=bool)
    sqrt2h = math.sqrt(2.0 * h)
    for k in range(n_steps):
        z = rng.standard_normal(reps)
        u = rng.random(reps)
        nxt = gap + sqrt2h * z
        with np.errstate(over="ignore", invalid="ignore"):
            cross = nxt <= 0.0
            safe = np.where(cross, 1.0, np.exp(-np.maximum(gap * nxt, 0.0) / h))
            cross |= u < safe
        newly = alive & cross
        times[newly] = h * (k + 1)
        alive &= ~cross
        gap = np.where(alive, nxt, 0.0)
    return times
