"""Kernel functions with smoothness metadata for low-rank block approximation.

A kernel carries the constants of its scaled-derivative growth bound

    |y^q d^q/dy^q kappa(y, xi)| <= C * q! * mu^q * q^nu * (y*xi)^(-s)

(and symmetrically in xi), plus a geometric local-error envelope
``c_tilde * c**q`` that dominates the block interpolation error on
admissible interval pairs.  Two kernels ship with the package: the
exponential kernel and the order-1/2 modified Bessel kernel of the
second kind; user kernels just supply a vectorized evaluator and their
constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .interp import Interval, make_basis

__all__ = [
    "Kernel",
    "exp_kernel",
    "bessel_half_kernel",
    "kernel_block",
    "scaled_derivative_fd",
    "smoothness_bound",
]


@dataclass(frozen=True)
class Kernel:
    """Immutable kernel with asymptotic-smoothness and local-error constants.

    ``fn`` must accept numpy arrays with broadcasting and be pure.
    """

    name: str
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    C: float
    mu: float
    nu: float
    s: float
    c_tilde: float
    c: float
    singular_at_zero: bool = False

    def __call__(self, y, xi):
        return self.fn(y, xi)


def _exp_eval(y, xi):
    return np.exp(-np.asarray(y, dtype=float) * np.asarray(xi, dtype=float))


def exp_kernel() -> Kernel:
    """The exponential kernel ``exp(-y*xi)``.

    Smooth up to the boundary (s = 0); its local interpolation error on any
    admissible block pair is at most ``2 * 4**(-q)``.
    """
    return Kernel(
        name="exp",
        fn=_exp_eval,
        C=1.0 / math.sqrt(2.0 * math.pi),
        mu=1.0,
        nu=-0.5,
        s=0.0,
        c_tilde=2.0,
        c=0.25,
    )


def _bessel_half_eval(y, xi):
    t = np.asarray(y, dtype=float) * np.asarray(xi, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("bessel_half kernel is singular for y*xi <= 0")
    return np.sqrt(math.pi / (2.0 * t)) * np.exp(-t)


def bessel_half_kernel() -> Kernel:
    """Order-1/2 modified Bessel kernel of the second kind.

    Closed form ``sqrt(pi/(2*y*xi)) * exp(-y*xi)``; depends on y and xi only
    through their product and blows up like ``(y*xi)**(-1/2)`` toward the
    origin (s = 1/2).
    """
    return Kernel(
        name="bessel",
        fn=_bessel_half_eval,
        C=math.sqrt(math.pi / 2.0),
        mu=1.0,
        nu=0.0,
        s=0.5,
        c_tilde=2.0 * math.pi,
        c=1.0 / 3.0,
        singular_at_zero=True,
    )


def kernel_block(kernel, A: Interval, B: Interval, q: int) -> np.ndarray:
    """Kernel values at the order-``q`` Chebyshev node pairs of A x B.

    Entry ``(s, r)`` is ``kernel(y_s, xi_r)`` with ``y_s`` the s-th node in
    A and ``xi_r`` the r-th node in B (both in decreasing node order).
    """
    ya = make_basis(q, A).nodes
    xb = make_basis(q, B).nodes
    return np.asarray(kernel(ya[:, None], xb[None, :]), dtype=float)


def smoothness_bound(kernel: Kernel, order: int, y, xi) -> np.ndarray:
    """Right-hand side ``C q! mu^q q^nu (y*xi)^(-s)`` of the derivative bound."""
    t = np.asarray(y, dtype=float) * np.asarray(xi, dtype=float)
    return (kernel.C * math.factorial(order) * kernel.mu**order
            * order**kernel.nu * t ** (-kernel.s))


def scaled_derivative_fd(kernel, order: int, y, xi, var: str = "y",
                         step_rel: float = 2e-3) -> np.ndarray:
    """Central finite-difference estimate of ``|u^q d^q kappa / du^q|``.

    ``u`` is ``y`` or ``xi`` according to ``var``; the step is relative to
    the differentiated coordinate.  Intended for test-time certification of
    kernel constants, not for production evaluation.
    """
    if order < 1:
        raise ValueError("derivative order must be >= 1")
    y = np.asarray(y, dtype=float)
    xi = np.asarray(xi, dtype=float)
    u = y if var == "y" else xi
    h = step_rel * u
    acc = np.zeros(np.broadcast(y, xi).shape)
    for k in range(order + 1):
        shift = (order / 2.0 - k) * h
        coeff = (-1.0) ** k * math.comb(order, k)
        if var == "y":
            acc = acc + coeff * kernel(u + shift, xi)
        else:
            acc = acc + coeff * kernel(y, u + shift)
    return np.abs(u**order * acc / h**order)
