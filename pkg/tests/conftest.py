"""Shared generators for randomised tests.

Pairs are built constructively (left path plus a nonnegative absorbing gap)
so every sample is a valid coalescing pair by construction; make_pair then
re-validates.
"""

import math

import numpy as np
import pytest

from pairweb import CoalescingPair, Path, make_pair
from pairweb.profiles import GapProfile, synthetic_profile

STEPS = (0.02, 0.025, 0.05, 0.1)


def random_pair(rng: np.random.Generator, horizon: float = 2.0) -> CoalescingPair:
    step = float(rng.choice(STEPS))
    n = int(round(horizon / step))
    shift = int(rng.integers(0, max(n // 4, 1)))  # keeps the later start <= 0.5
    x0 = float(rng.uniform(-0.8, 0.8))
    incr = rng.normal(0.0, 0.4 * math.sqrt(step), n)
    left_vals = np.clip(x0 + np.concatenate([[0.0], np.cumsum(incr)]), -0.95, 0.95)

    m = n - shift
    start_gap = 0.0 if rng.random() < 0.2 else float(rng.uniform(0.0, 0.4))
    start_gap = min(start_gap, 1.0 - float(left_vals[shift]))
    gap = np.abs(start_gap + np.cumsum(
        np.concatenate([[0.0], rng.normal(0.0, 0.3 * math.sqrt(step), m)])))
    gap = np.maximum(gap, 1e-9)
    gap[0] = start_gap
    if rng.random() < 0.7:  # absorb somewhere inside the horizon
        k = int(rng.integers(1, m + 1))
        gap[k:] = 0.0
    left = Path(t0=0.0, step=step, values=left_vals, frozen_after=n)
    right = Path(t0=step * shift, step=step, values=left_vals[shift:] + gap,
                 frozen_after=m)
    return make_pair(left, right)


def random_profile(rng: np.random.Generator, sigma: float) -> GapProfile:
    """Synthetic gap profile with dimension at most sigma."""
    length = float(rng.uniform(0.05, 1.0)) * sigma
    t_plus = float(rng.uniform(0.0, 1.0 - length))
    t_coal = t_plus + length
    k = int(rng.integers(3, 12))
    ts = np.linspace(t_plus, t_coal, k)
    xs = np.tanh(ts)
    gaps = sigma * rng.uniform(0.05, 1.0, k)
    gaps[-1] = 0.0
    gaps[0] = float(rng.choice([0.0, gaps[0]]))
    gaps[1:-1] = np.maximum(gaps[1:-1], 1e-6)
    return synthetic_profile(t_plus, t_coal, xs, gaps)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
