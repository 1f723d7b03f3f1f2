"""Seeded experiment drivers and output emission for the command line.

Each command maps to one driver returning (columns, rows, summary,
extra_tables).  Drivers are deterministic functions of their config: field
seeds are master seed + replica index, and the independent randomness
streams (Brownian references, dual estimators, measure fields) live at
fixed large offsets from the master seed.  All file writing goes through
``emit_outputs`` so repeated runs produce byte-identical data files.
"""

from __future__ import annotations

import json
import math
import shutil
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from pathlib import Path as FsPath

import numpy as np

from .brownian import EnsembleConfig, build_brownian_segment, sample_coalescing_ensemble
from .errors import PathsDidNotCoalesce, UsageError
from .io import file_sha256, fmt_float, read_pairs_file, write_csv
from .lattice import (
    ArrowField,
    arrow_bits,
    build_extended_slice,
    build_slice_web,
    sample_arrow_field,
)
from .metrics import (
    DEFAULT_PARAMS,
    MetricParams,
    PathDistanceEngine,
    _collect_paths,
    hausdorff_distance,
    pair_distance_matrix,
    profile_distance,
)
from .observables import (
    bottom_weights,
    persistence_sup,
    slow_pair_diagnostics,
    voter_persistence_profile,
    weight_measure,
)
from .profiles import standard_profile_of
from .stats import bootstrap_ks_se, ks_two_sample, mean_stderr

__all__ = [
    "ExperimentConfig",
    "run_experiment",
    "emit_outputs",
    "segment_collapse_times",
    "slice_s_samples",
    "mu_cos_samples",
    "matched_slice_distance",
    "extended_slice_distance",
]

_BROWNIAN_OFFSET = 1 << 33
_MEASURE_OFFSET = 1 << 34

COMMANDS = ("metrics", "converge", "persistence", "silo", "river", "diagnose")

_GLOBAL_DEFAULTS = dict(
    delta_list=[0.1], alpha_list=[0.25], reps=100, seed=0, horizon=2.0,
    n_max=24, grid_m=512, out_dir="runs", epsilon_list=[0.04, 0.02, 0.01],
    mu_max_time=256.0, width=None, height=None, fine_factor=4,
    pairs_file=None, ks_boot=200,
)

_COMMAND_DEFAULTS: dict[str, dict] = {
    "converge": dict(delta_list=[0.1, 0.05, 0.025], reps=50, grid_m=16),
    "persistence": dict(delta_list=[0.05], reps=2000,
                        alpha_list=[0.1, 0.15, 0.25, 0.4, 0.6]),
    "silo": dict(width=64, height=64, reps=100),
    "river": dict(width=64, height=64, reps=100),
    "diagnose": dict(delta_list=[0.02], reps=100),
}


@dataclass
class ExperimentConfig:
    """Fully resolved run configuration; every knob lands in the metadata."""

    command: str
    delta_list: list = dc_field(default_factory=lambda: [0.1])
    alpha_list: list = dc_field(default_factory=lambda: [0.25])
    reps: int = 100
    seed: int = 0
    horizon: float = 2.0
    n_max: int = 24
    grid_m: int = 512
    out_dir: str = "runs"
    epsilon_list: list = dc_field(default_factory=lambda: [0.04, 0.02, 0.01])
    mu_max_time: float = 256.0
    width: int | None = None
    height: int | None = None
    fine_factor: int = 4
    pairs_file: str | None = None
    ks_boot: int = 200

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for d in self.delta_list:
            if not 0.0 < d <= 0.5:
                raise UsageError(f"delta {d} outside (0, 0.5]")
        for a in self.alpha_list:
            if not 0.0 < a < 1.0:
                raise UsageError(f"alpha {a} outside (0, 1)")
        if self.reps < 1:
            raise UsageError("reps must be >= 1")
        if self.horizon <= 0:
            raise UsageError("horizon must be positive")
        if self.n_max < 2 or self.grid_m < 2:
            raise UsageError("n_max and grid_m must be >= 2")
        for e in self.epsilon_list:
            if e <= 0:
                raise UsageError("epsilon values must be positive")
        if self.command == "metrics" and not self.pairs_file:
            raise UsageError("metrics needs --pairs <file>")

    def metric_params(self) -> MetricParams:
        return MetricParams(n_max=self.n_max, grid_m=self.grid_m)

    def resolved(self) -> dict:
        return {
            "command": self.command, "delta_list": list(self.delta_list),
            "alpha_list": list(self.alpha_list), "reps": self.reps,
            "seed": self.seed, "horizon": self.horizon, "n_max": self.n_max,
            "grid_m": self.grid_m, "out_dir": self.out_dir,
            "epsilon_list": list(self.epsilon_list),
            "mu_max_time": self.mu_max_time, "width": self.width,
            "height": self.height, "fine_factor": self.fine_factor,
            "pairs_file": self.pairs_file, "ks_boot": self.ks_boot,
        }


def config_from_sources(command: str, file_values: dict | None,
                        flag_values: dict) -> ExperimentConfig:
    """Defaults, then config file, then flags; unknown file keys rejected."""
    values = dict(_GLOBAL_DEFAULTS)
    values.update(_COMMAND_DEFAULTS.get(command, {}))
    known = set(values)
    if file_values:
        unknown = set(file_values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    values.update({k: v for k, v in flag_values.items() if v is not None})
    cfg = ExperimentConfig(command=command, **values)
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# fast lattice functionals


def _even_width(delta: float, factor: float = 8.0) -> int:
    return int(math.ceil(factor / delta / 2.0) * 2)


def segment_collapse_times(field: ArrowField, alphas, delta: float) -> dict[float, float]:
    """Largest coalescence time of the segment web, per segment length.

    Equals persistence_sup of build_segment_web: the last pair of column
    walks to coalesce determines the sup, and walks from the first rows are
    a nested family, so one upward sweep answers every alpha.
    """
    step = delta * delta
    alphas = sorted(float(a) for a in alphas)
    m_rows = {a: 2 * (int(math.floor(a / step + 1e-9)) // 2) for a in alphas}
    top = max(m_rows.values())
    n = field.height - 1
    if top >= n:
        raise UsageError("field too short for the largest alpha")
    counts = {a: m_rows[a] // 2 + 1 for a in alphas}
    out: dict[float, float] = {}
    pos = np.empty(0, dtype=np.int64)
    for ell in range(n + 1):
        if ell % 2 == 0 and ell <= top:
            pos = np.append(pos, np.int64(0))
        for a in alphas:
            if a in out or ell < m_rows[a]:
                continue
            sub = pos[:counts[a]]
            if sub.max() == sub.min():
                out[a] = step * ell
        if len(out) == len(alphas) or ell == n:
            break
        pos = pos + field.directions(pos, ell)
    for a in alphas:
        out.setdefault(a, math.inf)
    return out


def slice_s_samples(delta: float, alpha: float, reps: int, seed: int,
                    horizon: float = 2.0) -> np.ndarray:
    """Replicated segment-web persistence sups (inf when past the horizon)."""
    width = _even_width(delta)
    height = int(math.ceil(horizon / delta ** 2)) + 2
    out = np.empty(reps)
    for r in range(reps):
        field = sample_arrow_field(seed + r, width, height)
        out[r] = segment_collapse_times(field, [alpha], delta)[alpha]
    return out


def mu_cos_samples(delta: float, reps: int, seed: int, max_time: float,
                   window=(-1.0, 1.0)) -> np.ndarray:
    """Per-seed integrals of cos(pi x) against the geometric weight measure.

    Seeds whose dual pairs stay open past the row budget (or whose region
    engulfs the cylinder) yield nan; they are reported, never silently
    truncated.  The field is much wider than the window because an open
    region wraps with probability about 2/width before coalescing.

    All replicas advance in one lockstep row sweep; the counter-based arrow
    derivation makes this trace identical to running each seed's
    weight_measure separately (values agree to rounding of the final sum).
    """
    width = _even_width(delta, factor=64.0)
    max_rows = int(math.ceil(max_time / delta ** 2))
    lo = int(math.ceil(window[0] / delta - 1e-9))
    hi = int(math.floor(window[1] / delta + 1e-9))
    sites = np.arange(lo, hi + 1, dtype=np.int64)
    sites = sites[sites % 2 == 0]
    n_sites = len(sites)

    seeds = seed + _MEASURE_OFFSET + np.arange(reps, dtype=np.int64)
    seed_flat = np.repeat(seeds, n_sites)
    left = np.tile(sites - 1, reps)
    right = np.tile(sites + 1, reps)
    areas = np.zeros(reps * n_sites)
    alive = np.ones(reps * n_sites, dtype=bool)
    failed = np.zeros(reps, dtype=bool)
    for ell in range(max_rows):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        gap = right[idx] - left[idx]
        wrapped = gap >= width
        if np.any(wrapped):
            failed[idx[wrapped] // n_sites] = True
            alive[idx[wrapped]] = False
            idx = idx[~wrapped]
            gap = gap[~wrapped]
        # dual step: oppose the bead choice directly above
        dl = 1 - 2 * arrow_bits(seed_flat[idx], left[idx], ell + 1, width)
        dr = 1 - 2 * arrow_bits(seed_flat[idx], right[idx], ell + 1, width)
        nl = left[idx] + dl
        nr = right[idx] + dr
        areas[idx] += 0.5 * (gap + (nr - nl))
        left[idx] = nl
        right[idx] = nr
        alive[idx] = nr > nl
    failed |= alive.reshape(reps, n_sites).any(axis=1)
    integrand = np.cos(math.pi * delta * sites.astype(float))
    totals = (delta ** 3 * areas.reshape(reps, n_sites) * integrand).sum(axis=1)
    return np.where(failed, math.nan, totals)


def matched_slice_distance(delta: float, seed: int, horizon: float,
                           params: MetricParams) -> float:
    """Hausdorff distance between one sampled slice web and a Brownian
    ensemble started from the same rescaled positions on the same grid."""
    width = _even_width(delta)
    height = int(math.ceil(horizon / delta ** 2)) + 2
    field = sample_arrow_field(seed, width, height)
    web = build_slice_web(field, 0.0, delta)
    starts = web.meta["starts"]
    cfg = EnsembleConfig(tuple((delta * int(i), 0.0) for i in starts),
                         step_h=delta * delta, horizon=horizon,
                         seed=seed + _BROWNIAN_OFFSET)
    reference = sample_coalescing_ensemble(cfg)
    hints = np.arange(len(web))
    return hausdorff_distance(web, reference, params, hints_ab=hints,
                              hints_ba=hints)


def extended_slice_distance(field: ArrowField, delta: float,
                            params: MetricParams = DEFAULT_PARAMS,
                            window=(-1.0, 1.0), fine_factor: int = 4) -> float:
    """Hausdorff distance between the extended and plain time-zero webs.

    The plain web's pairs reappear verbatim in the extended set, so that
    direction contributes zero; the other direction runs the exact pruned
    sup-min.  Pairs whose paths join their parent walks by the first grid
    row and share the parents' coalescence time have gap profiles that are
    identical on the whole sup-evaluation grid (which starts at 1/n_max >
    tanh(delta^2)), so their profile term against the parent pair vanishes
    exactly and only small profiles are ever materialised.
    """
    ext = build_extended_slice(field, delta, window, fine_factor)
    base: list = ext.meta["base"].pairs
    walk_paths = ext.meta["base"].meta["paths"]
    paths = ext.meta["paths"]
    parent = ext.meta["parent"]
    pair_parents = ext.meta["pair_parents"]
    m = len(walk_paths)
    step = delta * delta

    matrix = PathDistanceEngine(paths, walk_paths, params.n_max).matrix()
    row_of = {id(p): r for r, p in enumerate(paths)}

    def base_index(i: int, j: int) -> int:
        return i * m - (i * (i - 1)) // 2 + (j - i)

    walk_col = {id(p): c for c, p in enumerate(walk_paths)}
    b_cols = np.array([[walk_col[id(pr.left)], walk_col[id(pr.right)]]
                       for pr in base])

    n_ext = len(ext.pairs)
    a_rows = np.array([[row_of[id(pr.left)], row_of[id(pr.right)]]
                       for pr in ext.pairs])
    hint = np.array([base_index(pa, pb) for pa, pb in pair_parents])

    # upper bounds through the parent pair
    d11 = matrix[a_rows[:, 0], b_cols[hint, 0]]
    d12 = matrix[a_rows[:, 0], b_cols[hint, 1]]
    d21 = matrix[a_rows[:, 1], b_cols[hint, 0]]
    d22 = matrix[a_rows[:, 1], b_cols[hint, 1]]
    bar_hint = np.maximum(
        np.maximum(np.minimum(d11, d12), np.minimum(d21, d22)),
        np.maximum(np.minimum(d11, d21), np.minimum(d12, d22)))

    t_ext = np.array([pr.t_coal for pr in ext.pairs])
    t_hint = np.array([base[h].t_coal for h in hint])
    if math.tanh(step) > 1.0 / params.n_max:
        raise UsageError("extended-slice pruning needs tanh(delta^2) <= 1/n_max")
    shortcut = (t_ext == t_hint) & (t_ext >= 3.0 * step)
    # two degenerate pairs standardise to the same tent
    shortcut |= (t_ext == 0.0) & (t_hint == 0.0)

    ub = bar_hint.copy()
    slow = np.flatnonzero(~shortcut)
    for a in slow:
        pa = standard_profile_of(ext.pairs[a])
        qa = standard_profile_of(base[hint[a]])
        ub[a] += profile_distance(pa, qa, params)

    order = np.argsort(-ub)
    best_overall = 0.0
    for a in order:
        if ub[a] <= best_overall:
            break
        ra1, ra2 = a_rows[a]
        e11 = matrix[ra1, b_cols[:, 0]]
        e12 = matrix[ra1, b_cols[:, 1]]
        e21 = matrix[ra2, b_cols[:, 0]]
        e22 = matrix[ra2, b_cols[:, 1]]
        bar_row = np.maximum(
            np.maximum(np.minimum(e11, e12), np.minimum(e21, e22)),
            np.maximum(np.minimum(e11, e21), np.minimum(e12, e22)))
        best = ub[a]
        pa = standard_profile_of(ext.pairs[a])
        for b in np.argsort(bar_row, kind="stable"):
            if bar_row[b] >= best:
                break
            d = bar_row[b] + profile_distance(pa, standard_profile_of(base[b]),
                                              params)
            if d < best:
                best = d
        best_overall = max(best_overall, best)
    return best_overall


# ---------------------------------------------------------------------------
# command drivers


def _metrics_driver(cfg: ExperimentConfig):
    entries = read_pairs_file(cfg.pairs_file)
    params = cfg.metric_params()
    pairs = [p for _, p in entries]
    if pairs:
        paths_all, idx = _collect_paths(pairs)
        m = PathDistanceEngine(paths_all, paths_all, params.n_max).matrix()
        bar = pair_distance_matrix(m, idx, idx)
    rows = []
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            prof = profile_distance(standard_profile_of(pairs[i]),
                                    standard_profile_of(pairs[j]), params)
            rows.append((entries[i][0], entries[j][0],
                         fmt_float(bar[i, j]), fmt_float(prof),
                         fmt_float(bar[i, j] + prof)))
    summary = {"pairs": len(entries), "rows": len(rows)}
    return ["id_a", "id_b", "bar_d", "delta", "tilde_d"], rows, summary, {}


def _converge_driver(cfg: ExperimentConfig):
    params = cfg.metric_params()
    alpha = cfg.alpha_list[0]
    rows = []
    s_samples: dict[float, np.ndarray] = {}
    sb_samples: dict[float, np.ndarray] = {}
    mu_vals: dict[float, np.ndarray] = {}
    dh_vals: dict[float, list] = {}
    for delta in cfg.delta_list:
        s_disc = slice_s_samples(delta, alpha, cfg.reps, cfg.seed, cfg.horizon)
        mu = mu_cos_samples(delta, cfg.reps, cfg.seed, cfg.mu_max_time)
        s_brown = np.empty(cfg.reps)
        dh = []
        for r in range(cfg.reps):
            bcfg = EnsembleConfig(((0.0, 0.0),), step_h=delta * delta,
                                  horizon=cfg.horizon,
                                  seed=cfg.seed + _BROWNIAN_OFFSET + r)
            seg = build_brownian_segment(alpha, 2 * delta * delta, bcfg)
            s_brown[r] = persistence_sup(seg)
            dh.append(matched_slice_distance(delta, cfg.seed + r, cfg.horizon,
                                             params))
            rows.append((fmt_float(delta), cfg.seed + r, fmt_float(dh[-1]),
                         fmt_float(s_disc[r]), fmt_float(s_brown[r]),
                         fmt_float(mu[r]), cfg.n_max, cfg.grid_m,
                         fmt_float(cfg.horizon)))
        s_samples[delta] = s_disc
        sb_samples[delta] = s_brown
        mu_vals[delta] = mu
        dh_vals[delta] = dh
    summary: dict = {"alpha": alpha, "per_delta": {}, "delta_pairs": []}
    for delta in cfg.delta_list:
        mu_ok = mu_vals[delta][~np.isnan(mu_vals[delta])]
        mu_mean, mu_se = mean_stderr(mu_ok)
        dmean, dse = mean_stderr(dh_vals[delta])
        summary["per_delta"][str(delta)] = {
            "d_h_mean": dmean, "d_h_stderr": dse,
            "d_h_median": float(np.median(dh_vals[delta])),
            "ks_s_vs_brownian": ks_two_sample(s_samples[delta],
                                              sb_samples[delta]),
            "mu_cos_mean": mu_mean, "mu_cos_stderr": mu_se,
            "mu_failures": int(np.isnan(mu_vals[delta]).sum()),
        }
    for d1, d2 in zip(cfg.delta_list[:-1], cfg.delta_list[1:]):
        ks = ks_two_sample(s_samples[d1], s_samples[d2])
        se = bootstrap_ks_se(s_samples[d1], s_samples[d2], cfg.ks_boot,
                             cfg.seed)
        a, b = mu_vals[d1], mu_vals[d2]
        m1, s1 = mean_stderr(a[~np.isnan(a)])
        m2, s2 = mean_stderr(b[~np.isnan(b)])
        summary["delta_pairs"].append({
            "delta": d1, "delta_half": d2, "ks_s": ks, "ks_s_bootstrap_se": se,
            "mu_diff": abs(m1 - m2),
            "mu_combined_stderr": math.hypot(s1, s2),
        })
    cols = ["delta", "seed", "d_h", "s_discrete", "s_brownian",
            "mu_cos_integral", "n_max", "grid_m", "horizon"]
    return cols, rows, summary, {}


def _persistence_driver(cfg: ExperimentConfig):
    delta = cfg.delta_list[0]
    prof = voter_persistence_profile(cfg.alpha_list, delta, cfg.reps, cfg.seed,
                                     cfg.width)
    rows = []
    for a in sorted(cfg.alpha_list):
        e = prof["per_alpha"][float(a)]
        rows.append((fmt_float(a), e["m_rows"], fmt_float(e["forward"]),
                     fmt_float(e["forward_stderr"]), fmt_float(e["dual"]),
                     fmt_float(e["dual_stderr"]), cfg.reps))
    s_reps = min(cfg.reps, 200)
    width = _even_width(delta)
    height = int(math.ceil(cfg.horizon / delta ** 2)) + 2
    s_rows = []
    for r in range(s_reps):
        field = sample_arrow_field(cfg.seed + r, width, height)
        times = segment_collapse_times(field, cfg.alpha_list, delta)
        for a in sorted(cfg.alpha_list):
            s_rows.append((fmt_float(a), cfg.seed + r, fmt_float(times[a])))
    summary = {
        "delta": delta, "n_rows": prof["n_rows"], "width": prof["width"],
        "per_alpha": {str(a): prof["per_alpha"][float(a)]
                      for a in sorted(cfg.alpha_list)},
        "s_samples_per_alpha": s_reps,
    }
    cols = ["alpha", "m_rows", "forward_p", "forward_stderr", "dual_p",
            "dual_stderr", "reps"]
    extra = {"s_samples": (["alpha", "seed", "s_value"], s_rows)}
    return cols, rows, summary, extra


def _silo_driver(cfg: ExperimentConfig):
    width = cfg.width or 64
    height = cfg.height or 64
    delta = 2.0 / width
    rows = []
    residuals = []
    geo_failures = 0
    window = (-1.0, 1.0 - 2.0 / width)  # each cylinder site exactly once
    for r in range(cfg.reps):
        field = sample_arrow_field(cfg.seed + r, width, height)
        weights = bottom_weights(field)
        total = sum(weights.values())
        residual = total - (width // 2) * height
        residuals.append(residual)
        mu_beads = weight_measure(field, delta, window, "bead-count")
        for x, mass in zip(mu_beads.positions, mu_beads.masses):
            rows.append((cfg.seed + r, "bead-count", fmt_float(x),
                         fmt_float(mass), residual))
        try:
            mu_geo = weight_measure(field, delta, window, "geometric-area")
        except PathsDidNotCoalesce:
            geo_failures += 1
            continue
        for x, mass in zip(mu_geo.positions, mu_geo.masses):
            rows.append((cfg.seed + r, "geometric-area", fmt_float(x),
                         fmt_float(mass), residual))
    summary = {
        "width": width, "height": height, "delta": delta,
        "conservation_residual_max": max(abs(x) for x in residuals),
        "expected_total": (width // 2) * height,
        "geometric_failures": geo_failures,
        "reps": cfg.reps,
    }
    cols = ["seed", "kind", "position", "mass", "conservation_residual"]
    return cols, rows, summary, {}


def _diagnose_driver(cfg: ExperimentConfig):
    delta = cfg.delta_list[0]
    width = _even_width(delta)
    rows = []
    summary: dict = {"delta": delta, "per_epsilon": {}}
    for eps in cfg.epsilon_list:
        n_eps = max(int(round(eps / delta ** 2)), 1)
        height = n_eps + 2
        maxima = []
        for r in range(cfg.reps):
            field = sample_arrow_field(cfg.seed + r, width, height)
            rep = slow_pair_diagnostics(field, delta, eps)
            maxima.append(rep.max_region_diameter)
            rows.append((fmt_float(eps), cfg.seed + r, rep.slow_pair_count,
                         fmt_float(rep.max_region_diameter),
                         len(rep.region_diameters)))
        arr = np.array(maxima)
        summary["per_epsilon"][str(eps)] = {
            "exceed_fraction": float((arr > eps ** (1.0 / 3.0)).mean()),
            "threshold": eps ** (1.0 / 3.0),
            "median_max_diameter": float(np.median(arr)),
            "q90_max_diameter": float(np.quantile(arr, 0.9)),
        }
    cols = ["epsilon", "seed", "slow_pair_count", "max_region_diameter",
            "region_count"]
    return cols, rows, summary, {}


_DRIVERS = {
    "metrics": _metrics_driver,
    "converge": _converge_driver,
    "persistence": _persistence_driver,
    "silo": _silo_driver,
    "river": _silo_driver,
    "diagnose": _diagnose_driver,
}


def run_experiment(cfg: ExperimentConfig, out_root: str | None = None) -> dict:
    """Run one command and write its output directory; returns the manifest.

    Partial outputs are removed when the driver fails.
    """
    cfg.validate()
    columns, rows, summary, extra = _DRIVERS[cfg.command](cfg)
    return emit_outputs(cfg, columns, rows, summary, extra,
                        out_root or cfg.out_dir)


def emit_outputs(cfg: ExperimentConfig, columns, rows, summary, extra_tables,
                 out_root) -> dict:
    """Write <command>_<timestamp>/{data.csv, summary.json, config.json,
    manifest.json}; extra tables land as <name>.csv.  Data files carry no
    timestamps, so identical configs give identical bodies."""
    stamp = datetime.now(timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")
    root = FsPath(out_root)
    out_dir = root / f"{cfg.command}_{stamp}"
    out_dir.mkdir(parents=True, exist_ok=False)
    try:
        files = []
        with open(out_dir / "config.json", "w", encoding="utf-8") as fh:
            json.dump(cfg.resolved(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        files.append("config.json")
        if rows:
            write_csv(out_dir / "data.csv", columns, rows)
            files.append("data.csv")
        for name, (cols, tab_rows) in sorted(extra_tables.items()):
            write_csv(out_dir / f"{name}.csv", cols, tab_rows)
            files.append(f"{name}.csv")
        if summary:
            with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
                json.dump(summary, fh, indent=2, sort_keys=True)
                fh.write("\n")
            files.append("summary.json")
        manifest = {
            "command": cfg.command,
            "created_utc": stamp,
            "files": [{"name": n, "sha256": file_sha256(out_dir / n),
                       "bytes": (out_dir / n).stat().st_size}
                      for n in files],
        }
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        manifest["out_dir"] = str(out_dir)
        return manifest
    except BaseException:
        shutil.rmtree(out_dir, ignore_errors=True)
        raise
