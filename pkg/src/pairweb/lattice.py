"""Seeded arrow fields on the even lattice and coalescing walk webs.

An arrow field assigns an independent uniform left/right choice to every
even-parity site (i, ell) of a periodic lattice of the given width.  Arrows
are derived on demand from the seed by a counter-based hash (splitmix64 of
the site index), so identical (seed, width, height) give identical fields on
every platform and in any query order, and tall fields cost nothing to
store.

The same field drives three readings of an arrow at (i, ell):

- a walk at (i, ell) steps up to (i + d, ell + 1)        (walk webs)
- a bead at (i, ell) rests on (i + d, ell - 1)           (silo / river)
- a voter at (i, ell) copies the opinion of (i + d, ell - 1)

Walks are diffusively rescaled into paths: lattice site (i, ell) maps to
(delta * i, delta^2 * ell).  Positions are traced unwrapped; web builders
abort with WidthTooSmall whenever an ensemble spans the cylinder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AlphaTooSmall,
    BadDimensions,
    CrossingPaths,
    NoStartingSites,
    OutOfField,
    ParityError,
    WidthTooSmall,
)
from .paths import CoalescingPair, PairSet, Path

__all__ = [
    "ArrowField",
    "LatticeSite",
    "sample_arrow_field",
    "field_from_table",
    "dual_arrow_field",
    "walk_from",
    "trace_walks",
    "arrow_bits",
    "build_slice_web",
    "build_extended_slice",
    "build_segment_web",
    "build_full_web",
]

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def arrow_bits(seed, i, ell, width) -> np.ndarray:
    """Uniform bits for sites (i, ell): the counter-based generator.

    Broadcasts over any mix of scalars and arrays; i is reduced mod width.
    Returns int8 values in {0, 1}, 1 meaning a step to the right.
    """
    col = np.mod(np.asarray(i, dtype=np.int64), width).astype(np.uint64)
    row = np.asarray(ell, dtype=np.uint64)
    seed_arr = np.asarray(seed, dtype=np.int64).astype(np.uint64)
    with np.errstate(over="ignore"):
        counter = row * np.uint64(width) + col
        state = _mix64(seed_arr * _GOLDEN + np.uint64(1)) + counter * _GOLDEN
    return (_mix64(state) >> np.uint64(63)).astype(np.int8)


@dataclass(frozen=True)
class LatticeSite:
    i: int
    ell: int

    @property
    def primal(self) -> bool:
        return (self.i + self.ell) % 2 == 0


@dataclass(frozen=True)
class ArrowField:
    """Lattice of independent uniform left/right arrows, derived from a seed.

    kind "primal" fields carry arrows on even-parity sites.  kind "dual"
    fields sit on odd-parity sites; the dual arrow opposes the support
    choice of the bead directly above, which is exactly the rule that keeps
    dual upward edges from crossing primal downward edges.
    """

    seed: int
    width: int
    height: int
    kind: str = "primal"
    table: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.width < 4 or self.width % 2 != 0:
            raise BadDimensions(f"width must be even and >= 4, got {self.width}")
        if self.height < 1:
            raise BadDimensions(f"height must be >= 1, got {self.height}")

    @property
    def parity(self) -> int:
        return 0 if self.kind == "primal" else 1

    def directions(self, i, ell) -> np.ndarray:
        """Arrow directions (+-1) at sites (i, ell); vectorised."""
        i = np.asarray(i, dtype=np.int64)
        ell = np.asarray(ell, dtype=np.int64)
        if np.any((i + ell) % 2 != self.parity):
            raise ParityError(f"site parity must be {self.kind}")
        if np.any(ell < 0) or np.any(ell >= self.height):
            raise OutOfField(f"row outside [0, {self.height})")
        if self.kind == "dual":
            if self.table is not None:
                return (-self.table[ell + 1, np.mod(i, self.width)]).astype(np.int8)
            return (1 - 2 * arrow_bits(self.seed, i, ell + 1, self.width)).astype(np.int8)
        if self.table is not None:
            return self.table[ell, np.mod(i, self.width)]
        return (2 * arrow_bits(self.seed, i, ell, self.width) - 1).astype(np.int8)

    def direction(self, site: LatticeSite) -> int:
        return int(self.directions(site.i, site.ell))


def sample_arrow_field(seed: int, width: int, height: int) -> ArrowField:
    """Seeded arrow field; same arguments give an identical field everywhere."""
    seed = int(seed)
    if not -(1 << 63) <= seed < (1 << 63):
        raise BadDimensions("seed must fit in 64 bits")
    return ArrowField(seed, int(width), int(height))


def field_from_table(table: np.ndarray, seed: int = 0) -> ArrowField:
    """Field with explicit +-1 directions (tests and constructed examples)."""
    table = np.asarray(table, dtype=np.int8)
    if table.ndim != 2:
        raise BadDimensions("table must be height x width")
    return ArrowField(seed, table.shape[1], table.shape[0], "primal", table)


def dual_arrow_field(field: ArrowField) -> ArrowField:
    """Upward arrows on the odd sublattice that never cross the primal
    downward support edges: dual direction at (i, ell) opposes the primal
    choice of the bead at (i, ell + 1)."""
    if field.kind != "primal":
        raise ParityError("dual of a dual field is not defined")
    if field.height < 2:
        raise BadDimensions("dual field needs at least two primal rows")
    return ArrowField(field.seed, field.width, field.height - 1, "dual", field.table)


# ---------------------------------------------------------------------------
# walk tracing


def trace_walks(field: ArrowField, start_is: np.ndarray, start_ell: int,
                n_rows: int) -> np.ndarray:
    """Unwrapped walk positions, shape (len(start_is), n_rows + 1).

    All walks start on row start_ell and follow arrows upward; walks on the
    same site share every later position.  Raises WidthTooSmall when the
    traced ensemble spans the cylinder.
    """
    start_is = np.asarray(start_is, dtype=np.int64)
    if np.any((start_is + start_ell) % 2 != field.parity):
        raise ParityError("walk starts must match the field parity")
    if start_ell < 0 or start_ell + n_rows > field.height:
        raise OutOfField("walk horizon exceeds the field height")
    pos = np.empty((len(start_is), n_rows + 1), dtype=np.int64)
    pos[:, 0] = start_is
    for r in range(n_rows):
        pos[:, r + 1] = pos[:, r] + field.directions(pos[:, r], start_ell + r)
    if pos.size and (pos.max() - pos.min()) >= field.width:
        raise WidthTooSmall(
            f"walk ensemble spans {pos.max() - pos.min()} >= width {field.width}"
        )
    return pos


def walk_from(field: ArrowField, start: LatticeSite, delta: float,
              horizon_rows: int) -> Path:
    """Rescaled path of the walk from a lattice site: t0 = delta^2 * ell,
    positions delta * i, one grid step per row."""
    if horizon_rows > field.height - start.ell:
        raise OutOfField("horizon_rows exceeds field height minus start row")
    pos = trace_walks(field, np.array([start.i]), start.ell, horizon_rows)[0]
    return Path(t0=delta * delta * start.ell, step=delta * delta,
                values=delta * pos.astype(float), frozen_after=horizon_rows)


def _first_meet_rows(pos: np.ndarray) -> np.ndarray:
    """First row at which walks k and k+1 agree; inf when they never do."""
    m = pos.shape[0]
    meets = np.full(max(m - 1, 0), math.inf)
    for k in range(m - 1):
        eq = np.flatnonzero(pos[k] == pos[k + 1])
        if eq.size:
            meets[k] = float(eq[0])
    return meets


def _slice_row(tau: float, delta: float) -> int:
    return int(math.floor(tau / (delta * delta) + 1e-9))


def _slice_starts(row: int, delta: float, window: tuple[float, float]) -> np.ndarray:
    lo = int(math.ceil(window[0] / delta - 1e-9))
    hi = int(math.floor(window[1] / delta + 1e-9))
    sites = np.arange(lo, hi + 1, dtype=np.int64)
    return sites[(sites + row) % 2 == 0]


def build_slice_web(field: ArrowField, tau: float, delta: float,
                    window: tuple[float, float] = (-1.0, 1.0)) -> PairSet:
    """All ordered walk pairs started from one rescaled time slice.

    Starts are the even-parity sites of row floor(tau / delta^2) whose
    rescaled positions fall inside the window; the set holds every ordered
    pair including the diagonal ones, m (m + 1) / 2 for m starts.
    """
    row = _slice_row(tau, delta)
    starts = _slice_starts(row, delta, window)
    if starts.size == 0:
        raise NoStartingSites(f"no slice starts in window {window} at delta={delta}")
    n_rows = field.height - 1 - row
    if n_rows < 1:
        raise OutOfField("slice row is at or above the field top")
    pos = trace_walks(field, starts, row, n_rows)
    step = delta * delta
    t0 = step * row
    paths = [Path(t0=t0, step=step, values=delta * pos[k].astype(float),
                  frozen_after=n_rows) for k in range(len(starts))]
    meets = _first_meet_rows(pos)
    pairs = []
    m = len(paths)
    for i in range(m):
        run = 0.0
        for j in range(i, m):
            if j > i:
                run = max(run, meets[j - 1])
            if j == i:
                t_coal = t0
            else:
                t_coal = math.inf if math.isinf(run) else step * (row + run)
            pairs.append(CoalescingPair(paths[i], paths[j], t_plus=t0, t_coal=t_coal))
    return PairSet(pairs, meta={
        "delta": delta, "tau": tau, "row": row, "window": window,
        "starts": starts, "positions": pos, "paths": paths, "kind": "slice",
    })


def build_extended_slice(field: ArrowField, delta: float,
                         window: tuple[float, float] = (-1.0, 1.0),
                         fine_factor: int = 4) -> PairSet:
    """Time-zero slice web enlarged with starts from a fine spatial grid.

    Every multiple of delta / fine_factor in the window gains a path: a
    point strictly between lattice sites enters linearly and joins the walk
    of the enclosing even site at time delta^2; an odd lattice point
    contributes two paths, one joining each neighbouring walk.  The result
    is the set of all ordered pairs of the enlarged path family, with the
    parent walk of every path recorded in the metadata.
    """
    base = build_slice_web(field, 0.0, delta, window)
    starts, pos = base.meta["starts"], base.meta["positions"]
    walk_paths: list[Path] = base.meta["paths"]
    step = delta * delta
    n_rows = pos.shape[1] - 1
    m = len(walk_paths)
    site_of = {int(starts[k]): k for k in range(m)}

    # (start position, parent walk, path); walks are their own parents
    entries: list[tuple[float, int, Path]] = [
        (delta * starts[k], k, walk_paths[k]) for k in range(m)
    ]
    sub = np.arange(int(math.ceil(window[0] * fine_factor / delta - 1e-9)),
                    int(math.floor(window[1] * fine_factor / delta + 1e-9)) + 1)
    for g in sub:
        u = g / fine_factor          # lattice coordinate of the fine point
        x = g * delta / fine_factor
        if abs(u - round(u)) < 1e-12:
            if int(round(u)) % 2 == 0:
                continue             # an even site: the walk itself
            parents = [int(round(u)) - 1, int(round(u)) + 1]
        else:
            parents = [2 * int(round(u / 2.0))]
        for pi in parents:
            k = site_of.get(pi)
            if k is None:
                continue             # parent outside the window
            vals = (delta * pos[k].astype(float)).copy()
            vals[0] = x
            entries.append((x, k, Path(t0=0.0, step=step, values=vals,
                                       frozen_after=n_rows)))

    entries.sort(key=lambda e: (e[0], e[1]))
    paths = [e[2] for e in entries]
    parent = np.array([e[1] for e in entries], dtype=np.int64)
    xs = np.array([e[0] for e in entries])
    meets = _first_meet_rows(pos)
    run_meet = np.zeros((m, m))
    for a in range(m):
        run = 0.0
        for b in range(a + 1, m):
            run = max(run, meets[b - 1])
            run_meet[a, b] = run

    pairs = []
    pair_parents = []
    n = len(paths)
    for i in range(n):
        for j in range(i, n):
            pa, pb = int(parent[i]), int(parent[j])
            if i == j:
                t_coal = 0.0
            elif pa == pb:
                t_coal = step
            else:
                r = run_meet[min(pa, pb), max(pa, pb)]
                if math.isinf(r):
                    t_coal = math.inf
                elif r == 1.0 and xs[i] == xs[j]:
                    t_coal = 0.0     # same start, parents meet at once: equal paths
                else:
                    t_coal = r * step
            pairs.append(CoalescingPair(paths[i], paths[j], t_plus=0.0,
                                        t_coal=t_coal))
            pair_parents.append((min(pa, pb), max(pa, pb)))
    return PairSet(pairs, meta={
        "delta": delta, "window": window, "kind": "extended",
        "walk_paths": walk_paths, "paths": paths, "parent": parent,
        "pair_parents": np.array(pair_parents), "base": base,
        "fine_factor": fine_factor,
    })


def build_segment_web(field: ArrowField, alpha: float, delta: float) -> PairSet:
    """Ordered pairs of walks started from the vertical segment {0} x [0, alpha].

    alpha is rounded down to a multiple of delta^2 (the rounded value is
    recorded in the metadata); starts are the even rows up to it.
    """
    if alpha < 0:
        raise AlphaTooSmall("alpha must be nonnegative")
    step = delta * delta
    top = int(math.floor(alpha / step + 1e-9))
    rows = list(range(0, top + 1, 2))
    if rows[-1] >= field.height - 1:
        raise OutOfField("segment reaches the field top")
    n_rows = field.height - 1
    traces = [trace_walks(field, np.array([0]), r, n_rows - r)[0] for r in rows]
    paths = [Path(t0=step * r, step=step, values=delta * tr.astype(float),
                  frozen_after=len(tr) - 1) for r, tr in zip(rows, traces)]
    span = max(tr.max() for tr in traces) - min(tr.min() for tr in traces)
    if span >= field.width:
        raise WidthTooSmall("segment walks span the cylinder")
    pairs = []
    for a in range(len(rows)):
        for b in range(a, len(rows)):
            pairs.append(_walk_pair(paths[a], traces[a], rows[a],
                                    paths[b], traces[b], rows[b], step))
    return PairSet(pairs, meta={"delta": delta, "alpha": step * top,
                                "rows": np.array(rows), "traces": traces,
                                "kind": "segment"})


def _walk_pair(path_a: Path, tr_a: np.ndarray, row_a: int,
               path_b: Path, tr_b: np.ndarray, row_b: int,
               step: float) -> CoalescingPair:
    """Ordered pair of two traced walks; raises CrossingPaths when the walks
    cross (such pairs do not belong to a pair web)."""
    t_plus = step * max(row_a, row_b)
    if path_a is path_b:
        return CoalescingPair(path_a, path_b, t_plus=t_plus, t_coal=t_plus)
    off = max(row_a, row_b)
    a = tr_a[off - row_a:]
    b = tr_b[off - row_b:]
    n = min(len(a), len(b))
    diff = b[:n] - a[:n]
    nz = np.flatnonzero(diff)
    if nz.size == 0:
        return CoalescingPair(path_a, path_b, t_plus=t_plus, t_coal=t_plus)
    signs = np.sign(diff[nz])
    if signs.max() != signs.min():
        raise CrossingPaths("walks cross: not an ordered pair")
    left, right = (path_a, path_b) if diff[nz[0]] > 0 else (path_b, path_a)
    if nz[-1] == n - 1:
        t_coal = math.inf
    else:
        t_coal = step * float(off + nz[-1] + 1)  # canonical: step times row
    return CoalescingPair(left, right, t_plus=t_plus, t_coal=t_coal)


def build_full_web(field: ArrowField, delta: float,
                   window: tuple[float, float] = (-1.0, 1.0),
                   time_window: tuple[float, float] = (0.0, 1.0)) -> PairSet:
    """Ordered pairs of walks from every primal site of a space-time
    rectangle.  Crossing combinations (opposite-parity walks that change
    order) are excluded, as the pair web holds ordered pairs only.
    Quadratic in the site count; meant for small windows."""
    step = delta * delta
    row_lo = max(_slice_row(time_window[0], delta), 0)
    row_hi = _slice_row(time_window[1], delta)
    n_rows = field.height - 1
    paths: list[Path] = []
    traces: list[np.ndarray] = []
    rows: list[int] = []
    for row in range(row_lo, min(row_hi, n_rows - 1) + 1):
        starts = _slice_starts(row, delta, window)
        if starts.size == 0:
            continue
        pos = trace_walks(field, starts, row, n_rows - row)
        for k in range(len(starts)):
            paths.append(Path(t0=step * row, step=step,
                              values=delta * pos[k].astype(float),
                              frozen_after=n_rows - row))
            traces.append(pos[k])
            rows.append(row)
    if not paths:
        raise NoStartingSites("rectangle contains no primal sites")
    pairs = []
    for a in range(len(paths)):
        for b in range(a, len(paths)):
            try:
                pairs.append(_walk_pair(paths[a], traces[a], rows[a],
                                        paths[b], traces[b], rows[b], step))
            except CrossingPaths:
                continue
    return PairSet(pairs, meta={"delta": delta, "kind": "full"})
