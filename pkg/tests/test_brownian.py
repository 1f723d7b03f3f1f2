import math

import numpy as np
import pytest

from pairweb import (
    EnsembleConfig,
    bridge_cross_prob,
    build_brownian_segment,
    make_pair,
    pair_survival_times,
    persistence_sup,
    sample_coalescing_ensemble,
)
from pairweb.errors import DomainError


class TestBridgeCrossProb:
    def test_touching_endpoint_crosses_surely(self):
        assert bridge_cross_prob(0.0, 0.3, 0.01) == 1.0

    def test_matched_scale(self):
        h = 0.01
        a = b = math.sqrt(h)
        assert bridge_cross_prob(a, b, h) == pytest.approx(math.exp(-1.0))

    def test_vanishing_step(self):
        assert bridge_cross_prob(0.1, 0.1, 1e-8) < 1e-12

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            bridge_cross_prob(-0.1, 0.1, 0.01)

    def test_monte_carlo_oracle_subdivided_bridge(self):
        # oracle: simulate the variance-2 gap bridge from a to b on 1024
        # substeps and count paths whose minimum reaches zero
        a = b = 0.1
        h = 0.01
        n_sub, reps = 1024, 40000
        rng = np.random.default_rng(2)
        dt = h / n_sub
        z = rng.standard_normal((reps, n_sub)) * math.sqrt(2.0 * dt)
        w = np.concatenate([np.zeros((reps, 1)), np.cumsum(z, axis=1)], axis=1)
        # pin the endpoint: bridge = a + w_t - (t/h)(w_h - (b - a))
        t = np.linspace(0.0, h, n_sub + 1)
        bridge = a + w - (t / h)[None, :] * (w[:, -1:] - (b - a))
        hit = (bridge.min(axis=1) <= 0.0).mean()
        se = math.sqrt(hit * (1 - hit) / reps)
        # discrete minimum misses a little mass; allow the known O(sqrt(dt)) bias
        expected = math.exp(-a * b / h)
        assert abs(hit - expected) < 4 * se + 0.02


class TestEnsemble:
    def test_single_start_gives_diagonal_pair(self):
        cfg = EnsembleConfig(((0.2, 0.0),), step_h=0.01, horizon=0.2, seed=1)
        out = sample_coalescing_ensemble(cfg)
        assert len(out) == 1
        assert out[0].t_coal == out[0].t_plus == 0.0

    def test_pair_count_and_validity(self):
        starts = tuple((x, 0.0) for x in (-0.3, -0.1, 0.2, 0.5))
        cfg = EnsembleConfig(starts, step_h=0.01, horizon=1.0, seed=3)
        out = sample_coalescing_ensemble(cfg)
        assert len(out) == 10
        for pair in out:
            rebuilt = make_pair(pair.left, pair.right)
            assert rebuilt.t_coal == pair.t_coal

    def test_ordering_preserved(self):
        for seed in range(300):
            starts = tuple((x, 0.0) for x in (-0.5, -0.2, 0.0, 0.4))
            cfg = EnsembleConfig(starts, step_h=0.02, horizon=0.6, seed=seed)
            out = sample_coalescing_ensemble(cfg)
            vals = np.vstack([p.values for p in out.meta["paths"]])
            assert np.all(np.diff(vals, axis=0) >= 0.0)

    def test_merge_monotone_path_count(self):
        starts = tuple((x, 0.0) for x in np.linspace(-0.5, 0.5, 8))
        cfg = EnsembleConfig(starts, step_h=0.01, horizon=1.0, seed=9)
        out = sample_coalescing_ensemble(cfg)
        vals = np.vstack([p.values for p in out.meta["paths"]])
        distinct = [len(np.unique(vals[:, k])) for k in range(vals.shape[1])]
        assert all(a >= b for a, b in zip(distinct, distinct[1:]))

    def test_increment_variance(self):
        # pooled increments of a wide ensemble that rarely merges
        cfg = EnsembleConfig(((-0.9, 0.0), (0.9, 0.0)), step_h=0.001,
                             horizon=0.05, seed=11)
        incs = []
        for seed in range(1000):
            out = sample_coalescing_ensemble(
                EnsembleConfig(((-0.9, 0.0), (0.9, 0.0)), step_h=0.001,
                               horizon=0.05, seed=seed))
            for p in out.meta["paths"]:
                incs.append(np.diff(p.values))
        incs = np.concatenate(incs)
        assert len(incs) >= 1e5
        assert abs(incs.var() / 0.001 - 1.0) <= 0.02

    def test_two_start_survival_law(self):
        # P(no coalescence by 1) = erf(x / 2) for initial gap x
        x, h, reps = 0.2, 0.005, 4000
        alive = 0
        for seed in range(reps):
            cfg = EnsembleConfig(((0.0, 0.0), (x, 0.0)), step_h=h, horizon=1.0,
                                 seed=seed)
            out = sample_coalescing_ensemble(cfg)
            t = [p.t_coal for p in out if p.left is not p.right][0]
            alive += math.isinf(t)
        p_hat = alive / reps
        expected = math.erf(x / 2.0)
        se = math.sqrt(expected * (1 - expected) / reps)
        assert abs(p_hat - expected) <= 3 * se

    def test_survival_batch_matches_law(self):
        times = pair_survival_times(0.2, 0.005, 1.0, 10000, seed=4)
        p_hat = float(np.isinf(times).mean())
        expected = math.erf(0.1)
        se = math.sqrt(expected * (1 - expected) / len(times))
        assert abs(p_hat - expected) <= 3 * se

    def test_coalescence_time_distribution(self):
        # survival function of the coalescence time is erf(x / (2 sqrt(t)))
        x = 0.2
        times = pair_survival_times(x, 0.002, 1.0, 10000, seed=8)
        finite = times[np.isfinite(times)]
        ts = np.linspace(0.05, 0.95, 19)
        emp = np.array([(times > t).mean() for t in ts])
        theory = np.array([math.erf(x / (2 * math.sqrt(t))) for t in ts])
        assert np.max(np.abs(emp - theory)) <= 0.02


class TestBrownianSegment:
    def test_alpha_zero(self):
        cfg = EnsembleConfig(((0.0, 0.0),), step_h=0.01, horizon=0.5, seed=1)
        out = build_brownian_segment(0.0, 0.05, cfg)
        assert len(out) == 1

    def test_pairs_valid(self):
        cfg = EnsembleConfig(((0.0, 0.0),), step_h=0.005, horizon=1.0, seed=5)
        out = build_brownian_segment(0.25, 0.05, cfg)
        for pair in out:
            rebuilt = make_pair(pair.left, pair.right)
            assert rebuilt.t_coal == pair.t_coal

    def test_sup_equals_extreme_pair_time(self):
        for seed in range(20):
            cfg = EnsembleConfig(((0.0, 0.0),), step_h=0.005, horizon=2.0,
                                 seed=seed)
            out = build_brownian_segment(0.25, 0.05, cfg)
            alpha = 0.25
            s = persistence_sup(out)
            # leftmost/rightmost positions at level alpha among the paths
            k = int(round(alpha / 0.005))
            vals = []
            for p in out.meta["paths"]:
                vals.append(p.values_at(np.array([alpha]))[0])
            vals = np.array(vals)
            lo, hi = np.argmin(vals), np.argmax(vals)
            brute = max(pair.t_coal for pair in out)
            assert s == brute
            if lo != hi:
                ms = out.meta["merge_step"][lo, hi]
                extreme_t = math.inf if ms < 0 else 0.005 * ms
                assert s == extreme_t
