"""Tests for the dyadic band decomposition and its accuracy-driven parameters."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastlaplace.partition import (
    band_bounds,
    band_index,
    band_indices,
    interp_order,
    make_partition,
)


class TestParameters:
    def test_rank_examples(self):
        assert interp_order(1e-4) == 8
        assert interp_order(0.25) == 2

    def test_rank_clamped_at_two(self):
        assert interp_order(0.9) == 2

    def test_level_count_power_of_two_accuracy(self):
        p = make_partition(2.0**-10, 1.0, 1.0, "exp")
        assert p.M == 11
        assert np.all(p.ell == 1)

    def test_level_count_clamped_at_two(self):
        p = make_partition(0.5, 1e-3, 1e-3, "exp")
        assert p.M == 2

    def test_general_mode_scales_with_problem_size(self):
        p = make_partition(1e-4, 1.0, 1.0, "general", n=1024)
        assert p.M == math.ceil(math.log2(1024 / 1e-4)) + 1

    def test_disk_mode_level_count(self):
        eps = 1e-4
        p = make_partition(eps, math.log(1 / eps), 512.0, "disk", n=512)
        assert p.M == math.ceil(math.log2(512 * math.log(1 / eps) / eps)) + 1

    def test_column_ranges_within_bounds(self):
        for eps in (0.5, 1e-2, 1e-6):
            for scale in (0.01, 1.0, 300.0):
                p = make_partition(eps, scale, scale, "exp")
                assert np.all(p.ell >= 1)
                assert np.all(p.ell <= p.big_l + 1)
                assert np.all(p.big_l == p.M - np.arange(1, p.M))
                width = p.big_l - p.ell + 1
                assert np.all(width <= 2 * math.log2(1.0 / eps) + 2)

    def test_bands_tile_and_far_bands_admissible(self):
        p = make_partition(1e-3, 8.0, 8.0, "exp")
        assert p.y_band(p.M).lo == 0.0
        for m in range(1, p.M):
            band = p.y_band(m)
            assert band.admissible
            assert band.lo == pytest.approx(8.0 / 2.0**m)
        # adjacent bands share their edge
        for m in range(1, p.M):
            assert p.y_band(m + 1).hi == p.y_band(m).lo if m < p.M else True

    def test_requires_n_for_general_and_disk(self):
        with pytest.raises(ValueError):
            make_partition(1e-3, 1.0, 1.0, "general")

    def test_rejects_bad_accuracy_and_extents(self):
        with pytest.raises(ValueError):
            make_partition(0.0, 1.0, 1.0, "exp")
        with pytest.raises(ValueError):
            make_partition(1.5, 1.0, 1.0, "exp")
        with pytest.raises(ValueError):
            make_partition(1e-3, -1.0, 1.0, "exp")
        with pytest.raises(ValueError):
            make_partition(1e-3, 1.0, 1.0, "bogus")


class TestBandIndex:
    def test_top_belongs_to_first_band(self):
        assert band_index(8.0, 8.0, 4) == 1

    def test_zero_belongs_to_closed_near_field(self):
        assert band_index(0.0, 8.0, 4) == 4

    def test_left_open_edge_falls_through(self):
        # value 1 is the excluded left endpoint of (1, 2], so it lies in [0, 1]
        assert band_index(1.0, 8.0, 4) == 4

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            band_index(-0.1, 8.0, 4)
        with pytest.raises(ValueError):
            band_index(8.1, 8.0, 4)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.0, max_value=13.7))
    def test_tiling(self, value):
        top, M = 13.7, 9
        m = band_index(value, top, M)
        p = make_partition(1e-3, top, top, "exp")
        assert 1 <= m <= M
        band = p.y_band(m) if M == p.M else None
        lo = top / 2.0**m if m < M else 0.0
        hi = top / 2.0 ** (m - 1)
        if m < M:
            assert lo < value <= hi
        else:
            assert 0.0 <= value <= hi

    def test_monotone_in_value(self):
        vals = np.sort(np.random.default_rng(3).uniform(0.0, 5.0, 500))[::-1]
        idx = band_indices(vals, 5.0, 12)
        assert np.all(np.diff(idx) >= 0)

    def test_matches_linear_scan(self):
        rng = np.random.default_rng(11)
        top, M = 7.3, 10
        vals = np.concatenate([
            rng.uniform(0.0, top, 10_000),
            top / 2.0 ** np.arange(M + 2),  # exact band edges
            [0.0, top],
        ])
        fast = band_indices(vals, top, M)
        for v, m in zip(vals, fast):
            scan = M
            for cand in range(1, M):
                if top / 2.0**cand < v <= top / 2.0 ** (cand - 1):
                    scan = cand
                    break
            assert m == scan


class TestBandBounds:
    def test_slices_agree_with_band_index(self):
        rng = np.random.default_rng(5)
        top, M = 9.0, 8
        vals = np.sort(rng.uniform(0.0, top, 400))[::-1]
        bounds = band_bounds(vals, top, M)
        assert bounds[0] == 0 and bounds[-1] == vals.size
        for m in range(1, M + 1):
            for v in vals[bounds[m - 1]:bounds[m]]:
                assert band_index(v, top, M) == m

    def test_empty_input(self):
        bounds = band_bounds(np.empty(0), 1.0, 4)
        assert np.all(bounds == 0)
