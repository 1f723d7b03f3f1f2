"""Small statistics helpers shared by experiments and tests."""

from __future__ import annotations

import math

import numpy as np

__all__ = ["mean_stderr", "ks_two_sample", "bootstrap_ks_se"]


def mean_stderr(values) -> tuple[float, float]:
    """Sample mean and its standard error."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return math.nan, math.nan
    if x.size == 1:
        return float(x[0]), math.nan
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def ks_two_sample(x, y) -> float:
    """Two-sample Kolmogorov-Smirnov statistic; tolerates inf values."""
    x = np.sort(np.asarray(x, dtype=float))
    y = np.sort(np.asarray(y, dtype=float))
    pooled = np.concatenate([x, y])
    fx = np.searchsorted(x, pooled, side="right") / len(x)
    fy = np.searchsorted(y, pooled, side="right") / len(y)
    return float(np.abs(fx - fy).max())


def bootstrap_ks_se(x, y, n_boot: int = 200, seed: int = 0) -> float:
    """Bootstrap standard error of the two-sample KS statistic."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rng = np.random.default_rng(seed)
    stats = np.empty(n_boot)
    for b in range(n_boot):
        xb = x[rng.integers(0, len(x), len(x))]
        yb = y[rng.integers(0, len(y), len(y))]
        stats[b] = ks_two_sample(xb, yb)
    return float(stats.std(ddof=1))
