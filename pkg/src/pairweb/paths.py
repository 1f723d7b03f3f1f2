"""Piecewise-linear space-time paths and coalescing pairs.

A path starts at time ``t0`` from a position in [-1, 1] and is stored as
positions on a uniform time grid ``t0, t0+step, ...``.  Evaluation between
grid times interpolates linearly; evaluation before ``t0`` returns the start
value (the "hat" extension used by the sup metric); evaluation past the grid
returns the last value when the path is frozen, and is an error otherwise.

A coalescing pair is an ordered pair (left, right) of non-crossing paths that
either never meet after the later start time ``t_plus`` (coalescence time is
``inf``) or are identical from their coalescence time ``t_coal`` on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    CrossingPaths,
    DomainError,
    EmptySet,
    GridMismatch,
    NotCoalescing,
    QueryBeyondHorizon,
)

__all__ = [
    "Path",
    "CoalescingPair",
    "PairSet",
    "eval_path",
    "coalescence_time",
    "make_pair",
]

_ALIGN_RTOL = 1e-9


@dataclass(eq=False)
class Path:
    """A piecewise-linear path on a uniform time grid.

    frozen_after is the grid index past which the path is conventionally
    constant; None means evaluation beyond the grid is an error.
    """

    t0: float
    step: float
    values: np.ndarray
    frozen_after: int | None = None

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or len(self.values) == 0:
            raise DomainError("path needs a 1-d, non-empty value array")
        if self.step <= 0:
            raise DomainError(f"step must be positive, got {self.step}")
        if not 0.0 <= self.t0 <= 1.0:
            raise DomainError(f"start time must lie in [0, 1], got {self.t0}")
        if not -1.0 <= self.values[0] <= 1.0:
            raise DomainError(f"start position must lie in [-1, 1], got {self.values[0]}")
        if self.frozen_after is not None:
            if not 0 <= self.frozen_after < len(self.values):
                raise DomainError("frozen_after outside the value grid")

    @property
    def x0(self) -> float:
        return float(self.values[0])

    @property
    def end_time(self) -> float:
        return self.t0 + (len(self.values) - 1) * self.step

    @property
    def frozen(self) -> bool:
        return self.frozen_after is not None

    def grid_times(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(len(self.values))

    def value_at(self, t: float) -> float:
        if t < 0.0:
            raise DomainError(f"evaluation time must be >= 0, got {t}")
        if t <= self.t0:
            return float(self.values[0])
        k = (t - self.t0) / self.step
        near = round(k)
        if abs(k - near) <= 1e-9 * max(1.0, abs(k)) and near < len(self.values):
            return float(self.values[int(near)])  # exact at grid times
        idx = int(math.floor(k))
        if idx >= len(self.values) - 1:
            if t <= self.end_time + self.step * _ALIGN_RTOL:
                return float(self.values[-1])
            if self.frozen:
                return float(self.values[self.frozen_after])
            raise QueryBeyondHorizon(
                f"t={t} beyond grid end {self.end_time} of an unfrozen path"
            )
        frac = k - idx
        return float(self.values[idx] * (1.0 - frac) + self.values[idx + 1] * frac)

    def values_at(self, ts: np.ndarray) -> np.ndarray:
        """Vectorised hat evaluation: clamps left of t0, frozen right of the grid.

        Queries within rounding distance of a grid time return the stored
        value exactly, so coalescence detection by equality stays exact.
        """
        ts = np.asarray(ts, dtype=float)
        if not self.frozen and np.any(ts > self.end_time + self.step * _ALIGN_RTOL):
            raise QueryBeyondHorizon(
                f"evaluation beyond grid end {self.end_time} of an unfrozen path"
            )
        out = np.interp(ts, self.grid_times(), self.values)
        k = (ts - self.t0) / self.step
        near = np.rint(k)
        on_grid = (np.abs(k - near) <= 1e-9 * np.maximum(1.0, np.abs(k))) \
            & (near >= 0) & (near < len(self.values))
        if np.any(on_grid):
            out[on_grid] = self.values[near[on_grid].astype(int)]
        return out


def eval_path(path: Path, t: float) -> float:
    """Evaluate a path at time t with the hat extension (flat left of t0)."""
    return path.value_at(t)


def _check_alignment(f: Path, g: Path) -> None:
    if abs(f.step - g.step) > _ALIGN_RTOL * max(f.step, g.step):
        raise GridMismatch(f"steps differ: {f.step} vs {g.step}")
    offset = (g.t0 - f.t0) / f.step
    if abs(offset - round(offset)) > 1e-6:
        raise GridMismatch(
            f"start times {f.t0} and {g.t0} are not grid-aligned at step {f.step}"
        )


def _common_diff(f: Path, g: Path) -> tuple[np.ndarray, np.ndarray]:
    """Times and g - f values on the shared grid from t_plus to the later grid end."""
    _check_alignment(f, g)
    step = f.step
    t_plus = max(f.t0, g.t0)
    t_end = max(f.end_time, g.end_time)
    n = int(round((t_end - t_plus) / step))
    times = t_plus + step * np.arange(n + 1)
    return times, g.values_at(times) - f.values_at(times)


def coalescence_time(f: Path, g: Path) -> float:
    """First grid time >= t_plus from which the two paths agree for good.

    Returns ``math.inf`` when no such time exists within the horizon.  The
    paths must share grid alignment and must not cross.
    """
    times, diff = _common_diff(f, g)
    nz = np.flatnonzero(diff)
    if nz.size:
        signs = np.sign(diff[nz])
        if signs.max() != signs.min():
            raise CrossingPaths("sign of the path difference changes")
        if nz[-1] == len(diff) - 1:
            return math.inf
        return float(times[nz[-1] + 1])
    return float(times[0])


def make_pair(f: Path, g: Path) -> "CoalescingPair":
    """Order, validate and assemble a coalescing pair from two paths.

    Raises CrossingPaths when neither ordering holds, and NotCoalescing when
    the paths touch at an interior time and later separate (such pairs are
    excluded from the space of coalescing pairs).
    """
    times, diff = _common_diff(f, g)
    nz = np.flatnonzero(diff)
    if nz.size:
        signs = np.sign(diff[nz])
        if signs.max() != signs.min():
            raise CrossingPaths("paths cross: neither ordering holds")
        if signs[0] > 0:
            left, right = f, g
        else:
            left, right = g, f
            diff = -diff
        # Interior zeros are only legal at t_plus and inside the final run.
        if nz[-1] == len(diff) - 1:
            t_coal = math.inf
            interior = np.flatnonzero(diff[1:-1] == 0.0)
            if interior.size:
                raise NotCoalescing("paths touch and later separate")
        else:
            k = nz[-1] + 1
            t_coal = float(times[k])
            interior = np.flatnonzero(diff[1:k] == 0.0)
            if interior.size:
                raise NotCoalescing("paths touch and later separate")
    else:
        left, right = f, g
        t_coal = float(times[0])
    return CoalescingPair(left=left, right=right, t_plus=float(times[0]), t_coal=t_coal)


@dataclass(eq=False)
class CoalescingPair:
    """An ordered coalescing pair: left <= right from t_plus on.

    ``t_coal`` is the coalescence time, ``math.inf`` when the paths never
    meet within the horizon.  Construct through :func:`make_pair` unless the
    inputs are already validated (web builders do this for speed).
    """

    left: Path
    right: Path
    t_plus: float
    t_coal: float
    _profile: object = field(default=None, repr=False)
    _standard: object = field(default=None, repr=False)

    def gap_at(self, t: float) -> float:
        return self.right.value_at(t) - self.left.value_at(t)

    @property
    def diagonal(self) -> bool:
        return self.t_coal == self.t_plus

    def paths(self) -> tuple[Path, Path]:
        return self.left, self.right


class PairSet:
    """A finite set of coalescing pairs, the computable stand-in for a compact set."""

    def __init__(self, pairs: Sequence[CoalescingPair], meta: dict | None = None):
        self.pairs = list(pairs)
        self.meta = dict(meta or {})

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[CoalescingPair]:
        return iter(self.pairs)

    def __getitem__(self, i: int) -> CoalescingPair:
        return self.pairs[i]

    def require_nonempty(self) -> None:
        if not self.pairs:
            raise EmptySet("operation requires a non-empty pair set")

    def coalescence_times(self) -> np.ndarray:
        return np.array([p.t_coal for p in self.pairs])
