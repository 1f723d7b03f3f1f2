"""Lattice observables: silo weights, voter persistence, slow-pair diagnostics.

The silo reading of an arrow field gives every bead the weight of the beads
that rest on it; ``bottom_weights`` propagates those weights to the bottom
row.  ``enclosed_bead_count`` recounts the same number geometrically as the
beads caught between the two dual upward paths flanking a bottom site, and
``weight_measure`` rescales either count or the area between those dual
paths into an atomic measure on [-1, 1].  Routing unit water volumes down a
river network is the identical computation, so ``river_outputs`` is an
alias.

Voter persistence comes in two independent estimators: a forward simulation
of the opinion dynamics, and the dual probability that all backward walks
from a column segment coalesce by time zero.

``slow_pair_diagnostics`` finds neighbouring time-zero starts whose walks
survive a time budget without coalescing and measures the corridors between
consecutive surviving paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptySet, ParityError, PathsDidNotCoalesce
from .lattice import ArrowField, LatticeSite, arrow_bits, dual_arrow_field, trace_walks
from .paths import PairSet

__all__ = [
    "persistence_sup",
    "bottom_weights",
    "river_outputs",
    "enclosed_bead_count",
    "WeightMeasure",
    "weight_measure",
    "integrate_against",
    "voter_forward_persistence",
    "voter_persistence_profile",
    "DiagnosticsReport",
    "slow_pair_diagnostics",
]


def persistence_sup(pairs: PairSet) -> float:
    """Largest coalescence time over a pair set; inf propagates."""
    if len(pairs) == 0:
        raise EmptySet("persistence_sup of an empty pair set")
    return float(max(p.t_coal for p in pairs))


# ---------------------------------------------------------------------------
# silo / river weights


def _primal_cols(field: ArrowField, ell: int) -> np.ndarray:
    cols = np.arange(field.width)
    return cols[(cols + ell) % 2 == 0]


def bottom_weights(field: ArrowField) -> dict[int, int]:
    """Total weight supported by each bottom bead of a periodic field.

    Top-row beads weigh 1; every bead adds 1 to the weight it passes down
    along its support choice.  Keys are bottom columns in [0, width).
    """
    w = np.zeros(field.width)
    w[_primal_cols(field, field.height - 1)] = 1.0
    for ell in range(field.height - 1, 0, -1):
        cols = _primal_cols(field, ell)
        tgt = np.mod(cols + field.directions(cols, ell), field.width)
        w = np.bincount(tgt, weights=w[cols], minlength=field.width)
        w[_primal_cols(field, ell - 1)] += 1.0
    return {int(c): int(round(w[c])) for c in _primal_cols(field, 0)}


river_outputs = bottom_weights
"""Water volume arriving at each bottom site of the drainage reading —
the identical computation under its river-basin name."""


def enclosed_bead_count(field: ArrowField, site: LatticeSite | int) -> int:
    """Beads strictly between the dual upward paths flanking a bottom site.

    The count covers every row of the field, including the bead's own
    column, and equals the bead's total supported weight.  Raises
    PathsDidNotCoalesce when the region wraps the cylinder and stops being
    countable.
    """
    i = site.i if isinstance(site, LatticeSite) else int(site)
    ell0 = site.ell if isinstance(site, LatticeSite) else 0
    if ell0 != 0 or i % 2 != 0:
        raise ParityError("bottom site must be primal on row 0")
    dual = dual_arrow_field(field) if field.height > 1 else None
    left, right = i - 1, i + 1
    total = 0
    for ell in range(field.height):
        gap = right - left
        if gap >= field.width:
            raise PathsDidNotCoalesce("dual region wrapped the cylinder")
        total += gap // 2
        if gap == 0 or ell == field.height - 1:
            break
        left += int(dual.directions(left, ell))
        right += int(dual.directions(right, ell))
    return total


@dataclass(frozen=True)
class WeightMeasure:
    """Atomic measure on the rescaled bottom line.

    kind "bead-count" atoms are supported weights; kind "geometric-area"
    atoms are the areas between the rescaled flanking dual paths up to
    their coalescence.
    """

    delta: float
    kind: str
    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self) -> None:
        if np.any(self.masses < 0):
            raise DomainError("measure masses must be nonnegative")

    @property
    def atoms(self) -> dict[float, float]:
        return {float(x): float(m) for x, m in zip(self.positions, self.masses)}

    def total_mass(self) -> float:
        return float(self.masses.sum())


def integrate_against(mu: WeightMeasure, h) -> float:
    """Integral of a function against an atomic measure: sum of mass * h(x)."""
    if len(mu.masses) == 0:
        return 0.0
    return float(np.sum(mu.masses * np.asarray([h(x) for x in mu.positions])))


def weight_measure(field: ArrowField, delta: float,
                   window: tuple[float, float] = (-1.0, 1.0),
                   kind: str = "geometric-area",
                   max_rows: int | None = None) -> WeightMeasure:
    """Rescaled weight measure of the bottom sites inside a window.

    Bead-count atoms come straight from the weight propagation.  Geometric
    atoms integrate the rescaled gap between the dual paths from
    ((2k-1) delta, 0) and ((2k+1) delta, 0) up to their coalescence; if any
    window site's dual pair is still open at the row limit the measure is
    not defined and PathsDidNotCoalesce is raised.
    """
    lo = int(math.ceil(window[0] / delta - 1e-9))
    hi = int(math.floor(window[1] / delta + 1e-9))
    sites = np.arange(lo, hi + 1, dtype=np.int64)
    sites = sites[sites % 2 == 0]
    if sites.size == 0:
        raise DomainError("window contains no bottom sites")
    positions = delta * sites.astype(float)
    if kind == "bead-count":
        weights = bottom_weights(field)
        masses = np.array([weights[int(np.mod(s, field.width))] for s in sites],
                          dtype=float)
        return WeightMeasure(delta, kind, positions, masses)
    if kind != "geometric-area":
        raise DomainError(f"unknown measure kind {kind!r}")
    dual = dual_arrow_field(field)
    limit = field.height - 1 if max_rows is None else min(max_rows, field.height - 1)
    left = sites - 1
    right = sites + 1
    areas = np.zeros(len(sites))
    alive = np.ones(len(sites), dtype=bool)
    for ell in range(limit):
        gap = right - left
        if np.any(gap >= field.width):
            raise PathsDidNotCoalesce("dual region wrapped the cylinder")
        nl = left.copy()
        nr = right.copy()
        nl[alive] = left[alive] + dual.directions(left[alive], ell)
        nr[alive] = right[alive] + dual.directions(right[alive], ell)
        areas[alive] += 0.5 * (gap[alive] + (nr - nl)[alive])
        left, right = nl, nr
        alive = alive & (right > left)
        if not alive.any():
            break
    if alive.any():
        raise PathsDidNotCoalesce(
            f"{int(alive.sum())} dual pairs still open after {limit} rows"
        )
    return WeightMeasure(delta, kind, positions, delta ** 3 * areas)


# ---------------------------------------------------------------------------
# voter persistence


def _even_floor(x: int) -> int:
    return 2 * (x // 2)


def voter_persistence_profile(alphas, delta: float, reps: int, seed: int,
                              width: int | None = None) -> dict:
    """Forward and dual persistence estimates for several window fractions.

    One forward sweep tracks the origin's last opinion change; one dual
    sweep tracks how far down the column the backward walks must start to
    all coalesce by time zero.  Both use width-periodic dynamics and
    independent seed streams, with per-replica seeds seed + replica index.
    """
    alphas = sorted(float(a) for a in alphas)
    if reps < 1:
        raise DomainError("reps must be >= 1")
    n = int(round(1.0 / (delta * delta)))
    if width is None:
        width = int(math.ceil(8.0 / delta / 2.0) * 2)
    m_rows = {a: _even_floor(int(math.floor(n * a + 1e-9))) for a in alphas}

    # forward sweep: opinions on the cylinder, origin change tracking
    seeds = np.asarray(seed) + np.arange(reps, dtype=np.int64)
    opinions = np.tile(np.arange(width, dtype=np.int32), (reps, 1))
    last_change = np.zeros(reps, dtype=np.int64)
    prev_origin = opinions[:, 0].copy()
    cols_by_parity = [np.flatnonzero(np.arange(width) % 2 == p) for p in (0, 1)]
    for ell in range(1, n + 1):
        cols = cols_by_parity[ell % 2]
        bits = arrow_bits(seeds[:, None], cols[None, :], ell, width)
        nbr = np.mod(cols[None, :] + (2 * bits.astype(np.int64) - 1), width)
        opinions[:, cols] = np.take_along_axis(opinions, nbr, axis=1)
        if ell % 2 == 0:
            changed = opinions[:, 0] != prev_origin
            last_change[changed] = ell
            prev_origin = opinions[:, 0].copy()

    # dual sweep: backward walks from the column segment, independent seeds
    seeds2 = seeds + np.int64(2) ** 40
    start_rows = np.arange(0, n + 1, 2, dtype=np.int64)
    q = len(start_rows)
    pos = np.zeros((reps, q), dtype=np.int64)
    for ell in range(n, 0, -1):
        active = start_rows >= ell
        cols = pos[:, active]
        bits = arrow_bits(seeds2[:, None], cols, ell, width)
        pos[:, active] = np.mod(cols + (2 * bits.astype(np.int64) - 1), width)
    eq_last = pos == pos[:, -1:]
    suffix_ok = np.flip(np.logical_and.accumulate(np.flip(eq_last, axis=1), axis=1),
                        axis=1)
    first_all = np.where(suffix_ok, start_rows[None, :], np.int64(n + 2)).min(axis=1)

    out = {"n_rows": n, "width": width, "reps": reps, "per_alpha": {}}
    for a in alphas:
        m = m_rows[a]
        fwd = last_change <= m
        dual = first_all <= m
        pf, pd = fwd.mean(), dual.mean()
        out["per_alpha"][a] = {
            "m_rows": m,
            "forward": float(pf),
            "forward_stderr": float(math.sqrt(pf * (1 - pf) / reps)),
            "dual": float(pd),
            "dual_stderr": float(math.sqrt(pd * (1 - pd) / reps)),
        }
    return out


def voter_forward_persistence(alpha: float, delta: float, reps: int,
                              seed: int, width: int | None = None) -> dict:
    """Persistence probability of the origin over the window [alpha, 1].

    Returns the forward estimate, the dual backward-walk estimate from
    independent randomness, and their standard errors.
    """
    prof = voter_persistence_profile([alpha], delta, reps, seed, width)
    entry = prof["per_alpha"][float(alpha)]
    entry.update({"n_rows": prof["n_rows"], "width": prof["width"], "reps": reps})
    return entry


# ---------------------------------------------------------------------------
# slow-pair diagnostics


@dataclass(frozen=True)
class DiagnosticsReport:
    """Survivor pairs of one time-zero slice and their corridor widths.

    slow_pair_count is the number of neighbouring start pairs inside the
    window whose walks outlive the time budget; region_diameters are the
    rescaled sup gaps between consecutive surviving boundary paths.
    """

    epsilon: float
    slow_pair_count: int
    region_diameters: np.ndarray
    max_region_diameter: float


def slow_pair_diagnostics(field: ArrowField, delta: float, epsilon: float,
                          window: tuple[float, float] = (-1.0, 1.0),
                          search_window: tuple[float, float] = (-2.0, 2.0)) -> DiagnosticsReport:
    """Find slow neighbouring pairs at time zero and measure their corridors.

    Walks start from every even site of the search window; a neighbouring
    pair is slow when its walks do not meet within the time budget.  For
    consecutive slow pairs the corridor between the right path of one and
    the left path of the next is measured by its sup gap up to the budget;
    boundary corridors use the nearest slow pair outside the window, or the
    outermost walk when there is none.
    """
    step = delta * delta
    n_eps = max(int(round(epsilon / step)), 1)
    if n_eps > field.height - 1:
        raise DomainError("field is too short for the requested budget")
    lo = int(math.ceil(search_window[0] / delta - 1e-9))
    hi = int(math.floor(search_window[1] / delta + 1e-9))
    starts = np.arange(lo, hi + 1, dtype=np.int64)
    starts = starts[starts % 2 == 0]
    pos = trace_walks(field, starts, 0, n_eps)
    m = len(starts)
    slow = []
    for k in range(m - 1):
        if not np.any(pos[k] == pos[k + 1]):
            slow.append(k)
    in_window = [k for k in slow
                 if window[0] <= delta * starts[k] and delta * starts[k + 1] <= window[1]]

    # corridors run between the right path of one slow pair (walk k + 1) and
    # the left path of the next (walk k'); the outermost walks stand in when
    # no slow pair exists beyond the window edge
    bounds: list[tuple[int, int]] = []
    if slow:
        bounds.append((0, slow[0]))
        for a, b in zip(slow[:-1], slow[1:]):
            bounds.append((a + 1, b))
        bounds.append((slow[-1] + 1, m - 1))
    else:
        bounds.append((0, m - 1))
    kept = [
        (li, ri) for li, ri in bounds
        if ri >= li and delta * starts[ri] >= window[0]
        and delta * starts[li] <= window[1]
    ]
    diameters = np.array([
        delta * float(np.max(pos[ri] - pos[li])) for li, ri in kept
    ])
    max_d = float(diameters.max()) if diameters.size else 0.0
    return DiagnosticsReport(epsilon=step * n_eps,
                             slow_pair_count=len(in_window),
                             region_diameters=diameters,
                             max_region_diameter=max_d)
