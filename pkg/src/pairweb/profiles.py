"""Gap profiles of coalescing pairs and their standardised form.

The gap profile of a pair records right - left between the later start time
``t_plus`` and the coalescence time ``t_coal``, against compressed time
``x = tanh(t)`` (so ``t_coal = inf`` maps to ``x = 1``).  The standardised
profile re-centres that record on [0, 1): the stretch near the beginning is
shifted to start at 0, the stretch near coalescence is shifted to end at 1,
and the middle is filled linearly with slopes +1 and -1 through a midpoint
anchor.  Profiles with ``t_plus == t_coal`` are degenerate; their
standardised form is the tent over [0, 1] with value 0 at 1.

The standardised profiles feed the reciprocal-gap series metric in
:mod:`pairweb.metrics`, which is what makes touch-then-separate limits
non-Cauchy in the combined pair metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .paths import CoalescingPair

__all__ = ["GapProfile", "StandardProfile", "gap_profile", "standard_profile"]


def _compress(t: float) -> float:
    """tanh time compression; inf maps to 1."""
    return 1.0 if math.isinf(t) else math.tanh(t)


@dataclass(eq=False)
class GapProfile:
    """Gap of a coalescing pair sampled against compressed time.

    xs are tanh-images of the pair's grid times in [t_plus, t_coal]; between
    samples the gap is interpolated linearly.  For pairs that never coalesce
    within the horizon the last sample extends as a constant toward x = 1.
    """

    t_plus: float
    t_coal: float
    xs: np.ndarray
    gaps: np.ndarray
    degenerate: bool

    @property
    def t_plus_tilde(self) -> float:
        return _compress(self.t_plus)

    @property
    def t_coal_tilde(self) -> float:
        return _compress(self.t_coal)

    @property
    def length(self) -> float:
        return self.t_coal - self.t_plus

    @property
    def diameter(self) -> float:
        return 0.0 if self.degenerate else float(self.gaps.max())

    @property
    def dimension(self) -> float:
        return max(self.length, self.diameter)

    def gap(self, x) -> np.ndarray | float:
        """Interpolated gap at compressed time x (clamped at the sample ends)."""
        return np.interp(x, self.xs, self.gaps)


def gap_profile(pair: CoalescingPair) -> GapProfile:
    """Build the gap profile of a pair; cached on the pair."""
    if pair._profile is not None:
        return pair._profile  # type: ignore[return-value]
    t_plus, t_coal = pair.t_plus, pair.t_coal
    if t_coal == t_plus:
        prof = GapProfile(t_plus, t_coal, np.array([_compress(t_plus)]),
                          np.array([0.0]), degenerate=True)
        pair._profile = prof
        return prof
    step = pair.left.step
    t_end = max(pair.left.end_time, pair.right.end_time)
    if math.isfinite(t_coal):
        t_end = min(t_end, t_coal)
    n = max(int(round((t_end - t_plus) / step)), 1)
    times = t_plus + step * np.arange(n + 1)
    if math.isfinite(t_coal):
        times[-1] = t_coal
    gaps = pair.right.values_at(times) - pair.left.values_at(times)
    xs = np.tanh(times)
    prof = GapProfile(t_plus, t_coal, xs, gaps, degenerate=False)
    pair._profile = prof
    return prof


@dataclass(eq=False)
class StandardProfile:
    """Re-centred gap profile on [0, 1) with +-1 slope infill.

    Stored as sorted knots; evaluation interpolates linearly and extends the
    last knot to the right (pairs with infinite coalescence time keep their
    frozen gap toward x = 1; finite ones carry an explicit (1, 0) anchor).
    """

    knots_x: np.ndarray
    knots_y: np.ndarray
    t_mid_tilde: float
    mid_value: float
    branch_end: float      # end of the shifted beginning stretch
    branch_start: float    # start of the shifted coalescence stretch
    degenerate: bool
    _recip: dict = field(default_factory=dict, repr=False)

    def value(self, x) -> np.ndarray | float:
        return np.interp(x, self.knots_x, self.knots_y)

    @property
    def segment_a(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.knots_x <= self.branch_end
        return self.knots_x[m], self.knots_y[m]

    @property
    def segment_b(self) -> tuple[np.ndarray, np.ndarray]:
        m = self.knots_x >= self.branch_start
        return self.knots_x[m], self.knots_y[m]

    def reciprocals(self, points: np.ndarray, key=None) -> np.ndarray:
        """1 / value at the given points, cached per grid key."""
        if key is not None and key in self._recip:
            return self._recip[key]
        v = np.interp(points, self.knots_x, self.knots_y)
        with np.errstate(divide="ignore"):
            r = np.where(v > 0.0, 1.0 / np.maximum(v, 1e-300), np.inf)
        if key is not None:
            self._recip[key] = r
        return r


_TENT = (np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5, 0.0]))


def standard_profile(profile: GapProfile) -> StandardProfile:
    """Standardise a gap profile onto [0, 1).

    The beginning stretch is shifted to [0, (tc - tp) / 2], the coalescence
    stretch to [1 - (tc - tp) / 2, 1), and the gap between them is filled
    linearly through the midpoint anchor at x = 1/2, whose value makes the
    infill slopes exactly +1 and -1.  Degenerate profiles standardise to the
    tent over [0, 1].
    """
    if profile.degenerate:
        return StandardProfile(_TENT[0].copy(), _TENT[1].copy(),
                               t_mid_tilde=profile.t_plus_tilde, mid_value=0.5,
                               branch_end=0.0, branch_start=1.0, degenerate=True)
    tp, tc = profile.t_plus_tilde, profile.t_coal_tilde
    tm = 0.5 * (tp + tc)
    half = 0.5 * (tc - tp)
    mid_gap = float(profile.gap(tm))
    mid_value = mid_gap + 0.5 * (1.0 - (tc - tp))

    xs, gs = profile.xs, profile.gaps
    left_mask = xs < tm
    xa = np.concatenate([xs[left_mask] - tp, [half]])
    ya = np.concatenate([gs[left_mask], [mid_gap]])
    right_mask = xs > tm
    xb = np.concatenate([[1.0 - half], xs[right_mask] + (1.0 - tc)])
    yb = np.concatenate([[mid_gap], gs[right_mask]])

    kx = np.concatenate([xa, [0.5], xb])
    ky = np.concatenate([ya, [mid_value], yb])
    keep = np.empty(len(kx), dtype=bool)
    keep[0] = True
    keep[1:] = np.diff(kx) > 1e-15
    return StandardProfile(kx[keep], ky[keep], t_mid_tilde=tm, mid_value=mid_value,
                           branch_end=half, branch_start=1.0 - half, degenerate=False)


def standard_profile_of(pair: CoalescingPair) -> StandardProfile:
    """Standardised gap profile of a pair; cached on the pair."""
    if pair._standard is None:
        pair._standard = standard_profile(gap_profile(pair))
    return pair._standard  # type: ignore[return-value]


def synthetic_profile(t_plus: float, t_coal: float, xs: np.ndarray,
                      gaps: np.ndarray) -> GapProfile:
    """Assemble a gap profile directly from samples (tests and bounds work).

    xs must be increasing compressed times spanning [tanh(t_plus),
    tanh(t_coal)] with positive gaps strictly inside.
    """
    xs = np.asarray(xs, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    if t_coal == t_plus:
        return GapProfile(t_plus, t_coal, xs, gaps, degenerate=True)
    if np.any(gaps[1:-1] <= 0.0):
        raise DomainError("gap must be positive strictly inside the profile")
    return GapProfile(t_plus, t_coal, xs, gaps, degenerate=False)
