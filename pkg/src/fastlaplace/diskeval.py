"""Fast evaluation of f(z) = sum_k fhat_k * z^(xi_k) on the closed unit disk.

Writing the nodes in polar form ``z = exp(-y) * exp(2*pi*i*x)`` splits each
power into a decaying factor ``exp(-y*xi)`` and an oscillating factor
``exp(2*pi*i*x*xi)``, i.e. the evaluation matrix is the entrywise product
of a Laplace matrix and a nonequispaced Fourier matrix.  The plan reuses
the dyadic band decomposition of the Laplace factor and converts every
banded low-rank block times the Fourier block into a handful of Fourier
block products via the entrywise-product factorization

    (A o L K L'^T) fhat = row_sum( L o A diag(fhat) L' K^T ).

Nodes of modulus below the accuracy evaluate to (approximately) zero and
are skipped entirely; nodes of modulus within the accuracy of one reduce
to a plain Fourier product.

Per-factor budgets follow the error split for entrywise products: both
the Laplace approximation and a gridding Fourier backend are held to a
third of the target accuracy, so the combined output stays within
``epsilon * ||fhat||_1`` of the exact sum.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .fourier import DirectBackend, NfftBackend, make_backend
from .interp import lagrange_matrix, make_basis
from .kernels import exp_kernel, kernel_block
from .partition import band_bounds, make_partition

__all__ = [
    "PolarSplit",
    "polar_split",
    "DiskPlan",
    "make_disk_plan",
    "naive_disk_apply",
    "naive_disk_apply_adjoint",
    "hadamard_block_identity_check",
]

#: Modulus may exceed 1 by this much before a node is rejected (rounding of
#: points intended to sit exactly on the unit circle).
RADIUS_TOL = 1e-12

_CHUNK = 4_000_000


class PolarSplit(NamedTuple):
    """Result of :func:`polar_split`: near-zero indices and polar coordinates."""

    z0: np.ndarray  # indices with |z| < epsilon
    y: np.ndarray   # -log|z|, clamped to >= 0 (inf where z == 0)
    x: np.ndarray   # arg(z) / (2*pi), normalized into [0, 1)


def polar_split(nodes, epsilon: float) -> PolarSplit:
    """Split disk nodes into polar coordinates and the near-zero index set.

    Every node must satisfy ``|z| <= 1`` up to ``RADIUS_TOL``; moduli
    slightly above one are treated as lying on the circle (y = 0).
    """
    z = np.asarray(nodes, dtype=complex).ravel()
    r = np.abs(z)
    if r.size and r.max() > 1.0 + RADIUS_TOL:
        raise ValueError(f"node modulus {r.max()} exceeds 1")
    with np.errstate(divide="ignore"):
        y = np.where(r > 0.0, -np.log(np.where(r > 0.0, r, 1.0)), np.inf)
    y = np.maximum(y, 0.0)
    x = np.angle(z) / (2.0 * math.pi)
    x = np.mod(x, 1.0)
    x = np.where(x == 1.0, 0.0, x)  # guard against mod rounding up
    z0 = np.nonzero(r < epsilon)[0]
    return PolarSplit(z0=z0, y=y, x=x)


class DiskPlan:
    """Precomputed state for unit-disk evaluation; build with :func:`make_disk_plan`."""

    def __init__(self, epsilon: float, nodes, exponents, backend_kind: str = "direct"):
        if not 0.0 < epsilon < 1.0:
            raise ValueError(f"target accuracy must lie in (0, 1), got {epsilon}")
        if backend_kind not in ("direct", "nfft"):
            raise ValueError(f"unknown backend kind {backend_kind!r}")
        z = np.asarray(nodes, dtype=complex).ravel()
        xi = np.asarray(exponents, dtype=float).ravel()
        if z.size == 0 or xi.size == 0:
            raise ValueError("nodes and exponents must be nonempty")
        if xi.min() < 1.0 - 1e-9:
            raise ValueError("exponents must be >= 1")

        integer_exps = bool(np.max(np.abs(xi - np.rint(xi))) <= 1e-9)
        if not integer_exps:
            if backend_kind == "nfft":
                raise ValueError("the nfft backend requires integer exponents")
            on_cut = (z.real <= 0.0) & (z.imag == 0.0)
            if on_cut.any():
                raise ValueError(
                    "noninteger exponents exclude nodes on the nonpositive real axis"
                )

        self.epsilon = float(epsilon)
        self.backend_kind = backend_kind
        self.integer_exponents = integer_exps
        self.nodes = z
        self.exponents = xi

        split = polar_split(z, epsilon)
        self.z0 = split.z0

        # both factors of the entrywise product are held to a third of the
        # target accuracy; the remaining third absorbs their interaction
        eps_b = epsilon / 3.0
        y1 = math.log(1.0 / epsilon)
        xi1 = float(xi.max())

        retained = np.setdiff1d(np.arange(z.size), self.z0, assume_unique=True)
        y_ret = split.y[retained]
        order = np.argsort(-y_ret, kind="stable")
        self.retained = retained[order]          # caller indices, y descending
        self.y = y_ret[order]
        self.x = split.x[self.retained]

        self.perm_xi = np.argsort(-xi, kind="stable")
        self.xi = xi[self.perm_xi]

        n = max(z.size, math.ceil(xi1))
        part = make_partition(eps_b, y1, xi1, mode="disk", n=n)
        self.partition = part
        M = part.M

        self.y_bounds = band_bounds(self.y, y1, M)
        self.xi_bounds = band_bounds(self.xi, xi1, M)

        kern = exp_kernel()
        self.L_y = {}
        self.L_xi = {}
        for m in range(1, M):
            sl = self._y_slice(m)
            if sl.stop > sl.start:
                self.L_y[m] = lagrange_matrix(make_basis(part.q, part.y_band(m)), self.y[sl])
        for ell in range(1, M):
            sl = self._xi_slice(ell)
            if sl.stop > sl.start:
                self.L_xi[ell] = lagrange_matrix(make_basis(part.q, part.xi_band(ell)), self.xi[sl])
        self.K = {}
        for m in self.L_y:
            lo, hi = int(part.ell[m - 1]), int(part.big_l[m - 1])
            for ell in range(lo, hi + 1):
                if ell in self.L_xi:
                    self.K[(m, ell)] = kernel_block(kern, part.y_band(m), part.xi_band(ell), part.q)

        if backend_kind == "nfft":
            self.cutoff = math.ceil(part.q / 3)
            self.backend = make_backend("nfft", self.x, self.xi, cutoff=self.cutoff)
        else:
            self.cutoff = None
            self.backend = make_backend("direct", self.x, self.xi)

    # ------------------------------------------------------------------

    @property
    def q(self) -> int:
        return self.partition.q

    @property
    def M(self) -> int:
        return self.partition.M

    def _y_slice(self, m: int) -> slice:
        return slice(int(self.y_bounds[m - 1]), int(self.y_bounds[m]))

    def _xi_slice(self, ell: int) -> slice:
        return slice(int(self.xi_bounds[ell - 1]), int(self.xi_bounds[ell]))

    # ------------------------------------------------------------------

    def apply(self, fhat) -> np.ndarray:
        """Approximate ``f(z_j)`` with max-norm error <= epsilon * ||fhat||_1."""
        fh = np.asarray(fhat).ravel()
        if fh.size != self.xi.size:
            raise ValueError(f"coefficient length {fh.size} != exponent count {self.xi.size}")
        fhs = fh[self.perm_xi].astype(complex, copy=False)
        part = self.partition
        M = part.M
        out = np.zeros(self.y.size, dtype=complex)

        # per-band diagonal-scaled Lagrange factors, shared by all rows
        fhat_l = {ell: fhs[self._xi_slice(ell), None] * self.L_xi[ell] for ell in self.L_xi}

        sl_m = self._y_slice(M)
        if sl_m.stop > sl_m.start:
            out[sl_m] = self.backend.apply_block(sl_m, slice(None), fhs)

        for m in self.L_y:
            rows = self._y_slice(m)
            lo, hi = int(part.ell[m - 1]), int(part.big_l[m - 1])

            # frequencies below the resolved range: kernel is 1 to within
            # the budget, a plain Fourier block product
            tail = slice(int(self.xi_bounds[hi]), self.xi.size)
            if tail.stop > tail.start:
                out[rows] += self.backend.apply_block(rows, tail, fhs[tail])

            # resolved range: entrywise-product factorization
            stack = [fhat_l[ell] @ self.K[(m, ell)].T for ell in range(lo, hi + 1) if ell in self.L_xi]
            if stack:
                far = slice(int(self.xi_bounds[lo - 1]), int(self.xi_bounds[hi]))
                rhs = np.vstack(stack)
                f_block = self.backend.apply_block(rows, far, rhs)
                out[rows] += np.sum(self.L_y[m] * f_block, axis=1)

        result = np.zeros(self.nodes.size, dtype=complex)
        result[self.retained] = out
        return result

    def apply_adjoint(self, ghat) -> np.ndarray:
        """Approximate the conjugate-transpose product, same accuracy contract."""
        gv = np.asarray(ghat).ravel()
        if gv.size != self.nodes.size:
            raise ValueError(f"input length {gv.size} != node count {self.nodes.size}")
        gs = gv[self.retained].astype(complex, copy=False)
        part = self.partition
        M = part.M
        out = np.zeros(self.xi.size, dtype=complex)

        sl_m = self._y_slice(M)
        if sl_m.stop > sl_m.start:
            out += self.backend.apply_adjoint_block(sl_m, slice(None), gs[sl_m])

        for m in self.L_y:
            rows = self._y_slice(m)
            lo, hi = int(part.ell[m - 1]), int(part.big_l[m - 1])

            tail = slice(int(self.xi_bounds[hi]), self.xi.size)
            if tail.stop > tail.start:
                out[tail] += self.backend.apply_adjoint_block(rows, tail, gs[rows])

            stack = [self.L_xi[ell] @ self.K[(m, ell)] for ell in range(lo, hi + 1) if ell in self.L_xi]
            if stack:
                far = slice(int(self.xi_bounds[lo - 1]), int(self.xi_bounds[hi]))
                basis = np.vstack(stack)
                w_block = self.backend.apply_adjoint_block(rows, far, gs[rows, None] * self.L_y[m])
                out[far] += np.sum(basis * w_block, axis=1)

        result = np.empty(self.xi.size, dtype=complex)
        result[self.perm_xi] = out
        return result


def make_disk_plan(epsilon: float, nodes, exponents, backend_kind: str = "direct") -> DiskPlan:
    """Build an evaluation plan for ``f(z) = sum_k fhat_k * z^(xi_k)``.

    Parameters
    ----------
    epsilon : float
        Target accuracy in (0, 1).
    nodes : array_like of complex
        Evaluation points with ``|z| <= 1`` (up to rounding tolerance).
    exponents : array_like
        Exponents ``>= 1``, any order.  Noninteger exponents select the
        power branch with argument in [0, 2*pi) and exclude nodes on the
        nonpositive real axis.
    backend_kind : {"direct", "nfft"}
        Fourier factor backend; ``nfft`` requires integer exponents and
        uses a Kaiser-Bessel window with cutoff ``ceil(q/3)``.
    """
    return DiskPlan(epsilon, nodes, exponents, backend_kind)


def naive_disk_apply(nodes, exponents, fhat) -> np.ndarray:
    """Exact O(N * N') evaluation of ``sum_k fhat_k * z^(xi_k)``.

    Powers are computed through the polar form with argument in [0, 2*pi),
    the same branch the fast plan factorizes, so the two agree for
    noninteger exponents as well.
    """
    z = np.asarray(nodes, dtype=complex).ravel()
    xi = np.asarray(exponents, dtype=float).ravel()
    fh = np.asarray(fhat, dtype=complex).ravel()
    if fh.size != xi.size:
        raise ValueError(f"coefficient length {fh.size} != exponent count {xi.size}")
    split = polar_split(z, epsilon=np.finfo(float).tiny)
    w = -split.y + 2j * math.pi * split.x
    out = np.zeros(z.size, dtype=complex)
    step = max(1, _CHUNK // max(xi.size, 1))
    with np.errstate(invalid="ignore"):
        for i in range(0, z.size, step):
            block = np.exp(w[i : i + step, None] * xi[None, :])
            block[~np.isfinite(block)] = 0.0  # z == 0 rows: 0^xi = 0 for xi >= 1
            out[i : i + step] = block @ fh
    return out


def naive_disk_apply_adjoint(nodes, exponents, ghat) -> np.ndarray:
    """Exact conjugate-transpose counterpart of :func:`naive_disk_apply`."""
    z = np.asarray(nodes, dtype=complex).ravel()
    xi = np.asarray(exponents, dtype=float).ravel()
    gh = np.asarray(ghat, dtype=complex).ravel()
    if gh.size != z.size:
        raise ValueError(f"input length {gh.size} != node count {z.size}")
    split = polar_split(z, epsilon=np.finfo(float).tiny)
    wbar = -split.y - 2j * math.pi * split.x
    out = np.zeros(xi.size, dtype=complex)
    step = max(1, _CHUNK // max(z.size, 1))
    with np.errstate(invalid="ignore"):
        for i in range(0, xi.size, step):
            block = np.exp(xi[i : i + step, None] * wbar[None, :])
            block[~np.isfinite(block)] = 0.0
            out[i : i + step] = block @ gh
    return out


def hadamard_block_identity_check(q: int, sizes: tuple[int, int], seed: int,
                                  rtol: float = 1e-12) -> bool:
    """Self-test of the entrywise-product factorization on random factors.

    Draws random ``L_y (n_y x q)``, ``K (q x q)``, ``L_xi (n_xi x q)``, a
    random unit-modulus matrix ``A`` and coefficients ``fhat``, and checks

        (A o L_y K L_xi^T) fhat == row_sum( L_y o A diag(fhat) L_xi K^T )

    to relative tolerance ``rtol``.
    """
    n_y, n_xi = sizes
    rng = np.random.default_rng(seed)
    l_y = rng.standard_normal((n_y, q))
    l_xi = rng.standard_normal((n_xi, q))
    k = rng.standard_normal((q, q))
    a = np.exp(2j * math.pi * rng.random((n_y, n_xi)))
    fh = rng.standard_normal(n_xi) + 1j * rng.standard_normal(n_xi)

    lhs = (a * (l_y @ k @ l_xi.T)) @ fh
    rhs = np.sum(l_y * (a @ (fh[:, None] * l_xi) @ k.T), axis=1)
    scale = max(float(np.max(np.abs(lhs))), np.finfo(float).tiny)
    return bool(np.max(np.abs(lhs - rhs)) <= rtol * scale)
