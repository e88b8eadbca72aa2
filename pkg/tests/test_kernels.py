"""Tests for the built-in kernels and their smoothness certification."""

import math

import numpy as np
import pytest

from fastlaplace.interp import Interval, interp_error_sup
from fastlaplace.kernels import (
    bessel_half_kernel,
    exp_kernel,
    kernel_block,
    scaled_derivative_fd,
    smoothness_bound,
)


def _random_admissible_interval(rng) -> Interval:
    lo = 10.0 ** rng.uniform(-1.5, 1.5)
    return Interval(lo, lo + lo * rng.uniform(0.05, 1.0))


class TestExpKernel:
    def test_values(self):
        k = exp_kernel()
        assert k(0.0, 123.4) == 1.0
        assert k(1.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_symmetric_in_arguments(self):
        k = exp_kernel()
        assert k(0.7, 2.3) == k(2.3, 0.7)

    def test_constants(self):
        k = exp_kernel()
        assert k.C == pytest.approx(1.0 / math.sqrt(2 * math.pi))
        assert (k.mu, k.nu, k.s) == (1.0, -0.5, 0.0)
        # geometric envelope equals 2 * 4**(-q)
        assert k.c_tilde * k.c**5 == 2.0 ** (1 - 10)


class TestBesselHalfKernel:
    def test_closed_form_value(self):
        k = bessel_half_kernel()
        assert k(1.0, math.pi / 2) == pytest.approx(math.exp(-math.pi / 2), rel=1e-14)

    def test_depends_only_on_product(self):
        k = bessel_half_kernel()
        assert k(2.0, 0.5) == pytest.approx(k(1.0, 1.0), rel=1e-15)

    def test_large_near_origin(self):
        k = bessel_half_kernel()
        assert k(1e-12, 1.0) == pytest.approx(1.2533e6, rel=1e-4)

    def test_singular_evaluation_rejected(self):
        k = bessel_half_kernel()
        with pytest.raises(ValueError):
            k(0.0, 1.0)
        with pytest.raises(ValueError):
            k(np.array([1.0, 0.0]), np.array([1.0, 2.0]))

    def test_matches_scipy_bessel(self):
        kv = pytest.importorskip("scipy.special").kv
        k = bessel_half_kernel()
        t = np.array([0.1, 0.5, 1.0, 3.0, 7.5])
        np.testing.assert_allclose(k(t, np.ones_like(t)), kv(0.5, t), rtol=1e-12)

    def test_matches_integral_definition(self):
        quad = pytest.importorskip("scipy.integrate").quad
        k = bessel_half_kernel()
        for t in (0.3, 1.0, 2.5):
            # truncate where the integrand drops below ~1e-300
            upper = math.acosh(690.0 / t)
            val, err = quad(lambda u: math.exp(-t * math.cosh(u)) * math.cosh(0.5 * u),
                            0.0, upper)
            assert k(t, 1.0) == pytest.approx(val, rel=1e-9)


class TestKernelBlock:
    def test_single_node_block(self):
        block = kernel_block(exp_kernel(), Interval(1.0, 2.0), Interval(1.0, 2.0), 1)
        np.testing.assert_allclose(block, [[math.exp(-2.25)]], rtol=1e-15)

    def test_constant_kernel_all_ones(self):
        block = kernel_block(lambda y, xi: np.ones(np.broadcast(y, xi).shape),
                             Interval(1.0, 2.0), Interval(3.0, 4.0), 4)
        np.testing.assert_array_equal(block, np.ones((4, 4)))

    def test_product_kernel_symmetric_on_equal_intervals(self):
        block = kernel_block(exp_kernel(), Interval(2.0, 3.0), Interval(2.0, 3.0), 5)
        np.testing.assert_allclose(block, block.T, rtol=1e-15)


class TestAsymptoticSmoothness:
    @pytest.mark.parametrize("kernel", [exp_kernel(), bessel_half_kernel()],
                             ids=["exp", "bessel"])
    def test_scaled_derivatives_below_bound(self, kernel):
        rng = np.random.default_rng(42)
        y = rng.uniform(0.3, 2.5, size=100)
        xi = rng.uniform(0.3, 2.5, size=100)
        for order in range(1, 6):
            bound = smoothness_bound(kernel, order, y, xi)
            for var in ("y", "xi"):
                measured = scaled_derivative_fd(kernel, order, y, xi, var=var)
                assert np.all(measured <= 1.1 * bound), (kernel.name, order, var)

    @pytest.mark.parametrize("kernel", [exp_kernel(), bessel_half_kernel()],
                             ids=["exp", "bessel"])
    def test_geometric_envelope_dominates_block_error_bound(self, kernel):
        for q in range(2, 31):
            local = (2.0 * kernel.C * (kernel.mu / 4.0) ** q * q**kernel.nu
                     * (2.0 + (2.0 / math.pi) * math.log(q)))
            assert local <= kernel.c_tilde * kernel.c**q


class TestLocalErrorBounds:
    @pytest.mark.parametrize("kernel", [exp_kernel(), bessel_half_kernel()],
                             ids=["exp", "bessel"])
    def test_tensor_interpolant_meets_theoretical_bound(self, kernel):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = _random_admissible_interval(rng)
            b = _random_admissible_interval(rng)
            for q in range(2, 11):
                bound = (kernel.C * kernel.mu**q * q**kernel.nu / 2.0 ** (2 * q - 1)
                         * (2.0 + (2.0 / math.pi) * math.log(q))
                         * (a.lo * b.lo) ** (-kernel.s))
                assert interp_error_sup(kernel, a, b, q, 24) <= bound

    def test_exponential_kernel_distance_free_bound(self):
        rng = np.random.default_rng(2)
        k = exp_kernel()
        for _ in range(10):
            a = _random_admissible_interval(rng)
            b = _random_admissible_interval(rng)
            for q in (2, 4, 8):
                assert interp_error_sup(k, a, b, q, 20) <= 2.0 ** (1 - 2 * q)
