"""Chebyshev nodes and stable barycentric Lagrange interpolation.

All interpolation in this package happens at the zeros of the Chebyshev
polynomial of the first kind, mapped affinely onto a target interval.
The barycentric form of the Lagrange basis makes high orders numerically
stable and gives the node weights in closed form, so an interpolation
matrix for a batch of evaluation points is a single vectorized expression.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Closure",
    "Interval",
    "InterpBasis",
    "make_basis",
    "lagrange_matrix",
    "interp_error_sup",
    "chebyshev_points",
]

#: Relative slack (times interval diameter) when checking that an
#: evaluation point lies inside the interval.  Band edges computed in
#: floating point may place a node a few ulps outside its band.
BOUNDARY_TOL = 1e-12

#: Relative threshold (times interval diameter) below which an evaluation
#: point is treated as coinciding with an interpolation node, avoiding the
#: 0/0 in the barycentric quotient.
NODE_COLLISION_TOL = 1e-14


class Closure(enum.Enum):
    """Which endpoints belong to an interval."""

    CLOSED = "closed"
    HALF_OPEN_LEFT = "half_open_left"  # (lo, hi], used by dyadic bands


@dataclass(frozen=True)
class Interval:
    """A real segment ``[lo, hi]`` or ``(lo, hi]``.

    For subsets of the nonnegative half line the distance to the origin is
    ``lo``, so the admissibility condition "diameter does not exceed the
    distance to the singularity at 0" reads ``diam <= lo``.
    """

    lo: float
    hi: float
    closure: Closure = Closure.CLOSED

    def __post_init__(self) -> None:
        if not (self.lo <= self.hi):
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    @property
    def diam(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def admissible(self) -> bool:
        """True if ``diam <= dist(interval, 0)`` (interval in [0, inf))."""
        return self.diam <= self.lo

    def contains(self, x: float, tol: float = 0.0) -> bool:
        if self.closure is Closure.HALF_OPEN_LEFT:
            return self.lo < x <= self.hi + tol
        return self.lo - tol <= x <= self.hi + tol


@dataclass(frozen=True)
class InterpBasis:
    """Order-``q`` Chebyshev node set with barycentric weights on one interval.

    ``nodes`` are strictly decreasing (the cosine ordering) and all matrices
    produced from a basis index nodes in this order.
    """

    q: int
    interval: Interval
    nodes: np.ndarray
    weights: np.ndarray


def chebyshev_points(q: int, interval: Interval) -> np.ndarray:
    """Zeros of the degree-``q`` Chebyshev polynomial mapped onto ``interval``.

    Returned in decreasing order; all points lie strictly inside the
    interval.
    """
    if q < 1:
        raise ValueError(f"order must be >= 1, got {q}")
    j = np.arange(q)
    t = np.cos((2 * j + 1) * math.pi / (2 * q))
    return interval.midpoint + 0.5 * interval.diam * t


def make_basis(q: int, interval: Interval) -> InterpBasis:
    """Build the order-``q`` barycentric interpolation basis on ``interval``.

    Parameters
    ----------
    q : int
        Interpolation order (number of nodes), at least 1.
    interval : Interval
        Nondegenerate target interval (``lo < hi``).

    Returns
    -------
    InterpBasis
        Nodes ``midpoint + diam/2 * cos((2j+1)pi/(2q))`` and weights
        ``(-1)^r sin((2r+1)pi/(2q))``.
    """
    if q < 1:
        raise ValueError(f"interpolation order must be >= 1, got {q}")
    if not interval.lo < interval.hi:
        raise ValueError(f"degenerate interval [{interval.lo}, {interval.hi}]")
    nodes = chebyshev_points(q, interval)
    r = np.arange(q)
    weights = (-1.0) ** r * np.sin((2 * r + 1) * math.pi / (2 * q))
    return InterpBasis(q=q, interval=interval, nodes=nodes, weights=weights)


def lagrange_matrix(basis: InterpBasis, points) -> np.ndarray:
    """Evaluate all Lagrange basis polynomials of ``basis`` at ``points``.

    Entry ``(i, r)`` is the r-th barycentric Lagrange polynomial at
    ``points[i]``.  A point within ``NODE_COLLISION_TOL * diam`` of a node
    yields the corresponding unit row, which preserves the cardinal
    property for exact node inputs.

    Raises
    ------
    ValueError
        If a point lies outside the interval by more than
        ``BOUNDARY_TOL * diam``.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    iv = basis.interval
    tol = BOUNDARY_TOL * iv.diam
    if pts.size and (pts.min() < iv.lo - tol or pts.max() > iv.hi + tol):
        bad = pts[(pts < iv.lo - tol) | (pts > iv.hi + tol)][0]
        raise ValueError(f"point {bad!r} outside interval [{iv.lo}, {iv.hi}]")

    diff = pts[:, None] - basis.nodes[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        w = basis.weights[None, :] / diff
        out = w / w.sum(axis=1, keepdims=True)

    collide = np.abs(diff) <= NODE_COLLISION_TOL * iv.diam
    hit = collide.any(axis=1)
    if hit.any():
        rows = np.nonzero(hit)[0]
        cols = np.argmax(collide[rows], axis=1)
        out[rows] = 0.0
        out[rows, cols] = 1.0
    return out


def interp_error_sup(kernel, A: Interval, B: Interval, q: int, grid: int) -> float:
    """Sampled sup-norm error of the tensor interpolant of ``kernel`` on A x B.

    The interpolant uses kernel values at the order-``q`` Chebyshev node
    pairs of the two intervals; the error is sampled on a ``grid x grid``
    tensor of Chebyshev-spaced points (which never alias the interpolation
    nodes for ``grid != q``).

    ``kernel`` must be callable as ``kernel(y, xi)`` with numpy
    broadcasting.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    basis_a = make_basis(q, A)
    basis_b = make_basis(q, B)
    ga = chebyshev_points(grid, A)
    gb = chebyshev_points(grid, B)
    p = lagrange_matrix(basis_a, ga)
    r = lagrange_matrix(basis_b, gb)
    node_values = np.asarray(kernel(basis_a.nodes[:, None], basis_b.nodes[None, :]), dtype=float)
    approx = p @ node_values @ r.T
    exact = np.asarray(kernel(ga[:, None], gb[None, :]), dtype=float)
    return float(np.max(np.abs(exact - approx)))
