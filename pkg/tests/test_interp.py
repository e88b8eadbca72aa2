"""Tests for Chebyshev node generation and barycentric interpolation."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastlaplace.interp import (
    Closure,
    Interval,
    chebyshev_points,
    interp_error_sup,
    lagrange_matrix,
    make_basis,
)


class TestInterval:
    def test_properties(self):
        iv = Interval(1.0, 3.0)
        assert iv.diam == 2.0
        assert iv.midpoint == 2.0

    def test_admissible_iff_diam_below_distance(self):
        assert Interval(2.0, 4.0).admissible
        assert not Interval(1.0, 4.0).admissible

    def test_rejects_reversed_endpoints(self):
        with pytest.raises(ValueError):
            Interval(2.0, 1.0)

    def test_half_open_membership(self):
        iv = Interval(1.0, 2.0, Closure.HALF_OPEN_LEFT)
        assert not iv.contains(1.0)
        assert iv.contains(2.0)
        assert Interval(1.0, 2.0).contains(1.0)


class TestMakeBasis:
    def test_single_node_at_midpoint(self):
        b = make_basis(1, Interval(-1.0, 1.0))
        np.testing.assert_allclose(b.nodes, [0.0], atol=1e-16)

    def test_two_nodes_reference_interval(self):
        b = make_basis(2, Interval(-1.0, 1.0))
        np.testing.assert_allclose(b.nodes, [0.70711, -0.70711], atol=5e-6)

    def test_two_nodes_affine_map(self):
        b = make_basis(2, Interval(0.0, 2.0))
        np.testing.assert_allclose(b.nodes, [1.70711, 0.29289], atol=5e-6)

    @pytest.mark.parametrize("q", [1, 2, 3, 7, 20])
    def test_nodes_decreasing_and_interior(self, q):
        iv = Interval(0.5, 4.0)
        b = make_basis(q, iv)
        assert np.all(np.diff(b.nodes) < 0) or q == 1
        assert b.nodes.min() > iv.lo and b.nodes.max() < iv.hi
        assert np.all(b.weights != 0.0)

    def test_rejects_degenerate_interval(self):
        with pytest.raises(ValueError):
            make_basis(3, Interval(1.0, 1.0))

    def test_rejects_zero_order(self):
        with pytest.raises(ValueError):
            make_basis(0, Interval(0.0, 1.0))


class TestLagrangeMatrix:
    def test_cardinal_property_exact(self):
        for q in (1, 2, 5, 13):
            b = make_basis(q, Interval(0.25, 1.75))
            np.testing.assert_array_equal(lagrange_matrix(b, b.nodes), np.eye(q))

    def test_midpoint_row_for_two_nodes(self):
        b = make_basis(2, Interval(-1.0, 1.0))
        np.testing.assert_allclose(lagrange_matrix(b, [0.0]), [[0.5, 0.5]], atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(min_value=0.5, max_value=4.0), st.integers(min_value=1, max_value=16))
    def test_rows_sum_to_one(self, point, q):
        b = make_basis(q, Interval(0.5, 4.0))
        row = lagrange_matrix(b, [point])
        assert abs(row.sum() - 1.0) <= 1e-12

    def test_point_outside_interval_rejected(self):
        b = make_basis(4, Interval(0.0, 1.0))
        with pytest.raises(ValueError):
            lagrange_matrix(b, [1.0 + 1e-6])

    def test_boundary_slack_tolerated(self):
        b = make_basis(4, Interval(0.0, 1.0))
        lagrange_matrix(b, [1.0 + 1e-13])  # inside the documented tolerance

    def test_polynomial_reproduction(self):
        rng = np.random.default_rng(7)
        for q in (2, 5, 11, 20):
            iv = Interval(2.0, 5.0)
            b = make_basis(q, iv)
            coeffs = rng.uniform(-1.0, 1.0, size=q)
            cheb = np.polynomial.chebyshev.Chebyshev(coeffs, domain=[iv.lo, iv.hi])
            pts = rng.uniform(iv.lo, iv.hi, size=100)
            approx = lagrange_matrix(b, pts) @ cheb(b.nodes)
            exact = cheb(pts)
            scale = np.max(np.abs(exact))
            assert np.max(np.abs(approx - exact)) <= 1e-12 * scale

    def test_lebesgue_function_bound(self):
        grid = np.linspace(-1.0, 1.0, 10_000)
        for q in range(2, 21):
            b = make_basis(q, Interval(-1.0, 1.0))
            leb = np.abs(lagrange_matrix(b, grid)).sum(axis=1).max()
            assert leb <= 1.0 + (2.0 / math.pi) * math.log(q)


class TestInterpErrorSup:
    def test_constant_kernel_reproduced(self):
        err = interp_error_sup(lambda y, xi: np.ones(np.broadcast(y, xi).shape),
                               Interval(1.0, 2.0), Interval(2.0, 4.0), 3, 30)
        assert err <= 1e-14

    def test_exponential_kernel_local_bound(self):
        err = interp_error_sup(lambda y, xi: np.exp(-y * xi),
                               Interval(1.0, 2.0), Interval(1.0, 2.0), 6, 40)
        assert err <= 2.0 ** (1 - 12)

    def test_bilinear_kernel_exact_at_order_two(self):
        err = interp_error_sup(lambda y, xi: y * xi,
                               Interval(1.0, 2.0), Interval(3.0, 6.0), 2, 25)
        assert err <= 1e-12

    def test_grid_too_small_rejected(self):
        with pytest.raises(ValueError):
            interp_error_sup(lambda y, xi: y * xi, Interval(1.0, 2.0), Interval(1.0, 2.0), 2, 1)


def test_chebyshev_points_match_basis_nodes():
    iv = Interval(0.0, 8.0)
    np.testing.assert_array_equal(chebyshev_points(5, iv), make_basis(5, iv).nodes)
