"""Accuracy-driven dyadic decomposition of [0, top] into geometric bands.

The target accuracy fixes the interpolation order ``q``, the number of
levels ``M``, and for every spatial band the range of frequency bands
``[ell[m], L[m]]`` that has to be resolved by interpolation; frequencies
below the range contribute less than the accuracy, frequencies above it
see a kernel that is constant to within the accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interp import Closure, Interval

__all__ = ["DyadicPartition", "make_partition", "band_index", "band_indices", "interp_order"]

_MODES = ("exp", "general", "disk")


def interp_order(epsilon: float) -> int:
    """Interpolation order for a target accuracy, clamped to at least 2."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"target accuracy must lie in (0, 1), got {epsilon}")
    return max(2, math.ceil(0.5 + math.log(1.0 / epsilon, 4.0)))


@dataclass(frozen=True)
class DyadicPartition:
    """Band decomposition parameters for accuracy ``epsilon`` on [0,y1] x [0,xi1].

    ``ell`` and ``big_l`` hold the per-band frequency column ranges
    ``ell[m-1] = ell_m`` and ``big_l[m-1] = L_m`` for ``m = 1..M-1``.
    """

    epsilon: float
    y1: float
    xi1: float
    q: int
    M: int
    mode: str
    ell: np.ndarray
    big_l: np.ndarray

    def y_band(self, m: int) -> Interval:
        return _band(self.y1, m, self.M)

    def xi_band(self, ell: int) -> Interval:
        return _band(self.xi1, ell, self.M)


def _band(top: float, m: int, M: int) -> Interval:
    if not 1 <= m <= M:
        raise ValueError(f"band index {m} outside 1..{M}")
    if m == M:
        return Interval(0.0, top / 2.0 ** (M - 1), Closure.CLOSED)
    return Interval(top / 2.0**m, top / 2.0 ** (m - 1), Closure.HALF_OPEN_LEFT)


def make_partition(epsilon: float, y1: float, xi1: float, mode: str = "exp",
                   n: int | None = None, q: int | None = None) -> DyadicPartition:
    """Compute the dyadic band structure for the requested transform mode.

    Parameters
    ----------
    epsilon : float
        Target accuracy in (0, 1).
    y1, xi1 : float
        Positive extents of the spatial and frequency domains.
    mode : {"exp", "general", "disk"}
        Chooses the level-count rule: ``exp`` uses
        ``M = ceil(log2(y1*xi1/eps)) + 1``, ``general`` multiplies the
        argument by ``n``, ``disk`` uses ``ceil(log2(n*log(1/eps)/eps)) + 1``.
    n : int, optional
        Problem size; required for the ``general`` and ``disk`` modes.
    q : int, optional
        Override for the interpolation order (the ``general`` transform
        derives it from kernel constants); defaults to the accuracy rule.

    The level count is clamped below at 2 so that at least one far-field
    band exists even when ``y1*xi1 <= epsilon``.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"target accuracy must lie in (0, 1), got {epsilon}")
    if y1 <= 0.0 or xi1 <= 0.0:
        raise ValueError(f"domain extents must be positive, got y1={y1}, xi1={xi1}")
    if mode not in _MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {_MODES}")
    if mode in ("general", "disk") and n is None:
        raise ValueError(f"mode {mode!r} requires the problem size n")

    if q is None:
        q = interp_order(epsilon)
    loge = math.log(1.0 / epsilon)  # natural log throughout
    if mode == "exp":
        M = math.ceil(math.log2(y1 * xi1 / epsilon)) + 1
    elif mode == "general":
        M = math.ceil(math.log2(y1 * xi1 * n / epsilon)) + 1
    else:  # disk
        M = math.ceil(math.log2(n * loge / epsilon)) + 1
    M = max(2, M)

    m = np.arange(1, M)
    big_l = M - m
    ell = np.floor(math.log2(y1 * xi1) - m - math.log2(loge)).astype(int) + 1
    ell = np.clip(ell, 1, big_l + 1)
    return DyadicPartition(epsilon=float(epsilon), y1=float(y1), xi1=float(xi1),
                           q=int(q), M=int(M), mode=mode, ell=ell, big_l=big_l)


def band_indices(values, top: float, M: int) -> np.ndarray:
    """Vectorized band lookup: the unique m with ``values[i]`` in band m.

    Band ``m < M`` is ``(top/2^m, top/2^(m-1)]``; band ``M`` is the closed
    near-field ``[0, top/2^(M-1)]``.  A closed-form ``ceil(-log2(v/top))``
    guess is corrected by a one-step scan in each direction so the result
    agrees bit-exactly with the interval convention at band edges.
    """
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.size and (v.min() < 0.0 or v.max() > top):
        bad = v[(v < 0.0) | (v > top)][0]
        raise ValueError(f"value {bad!r} outside [0, {top}]")
    with np.errstate(divide="ignore"):
        guess = np.ceil(-np.log2(np.where(v > 0.0, v / top, 1.0)))
    m = np.clip(guess, 1, M).astype(int)
    # correct upward overshoot (value above the band's upper edge)
    upper = top / 2.0 ** (m - 1)
    m = np.where(v > upper, m - 1, m)
    # correct downward (value at or below the band's lower edge)
    lower = top / 2.0**m
    m = np.where((m < M) & (v <= lower), m + 1, m)
    lower = top / 2.0**m
    m = np.where((m < M) & (v <= lower), m + 1, m)
    m = np.where(v == 0.0, M, m)
    return m


def band_index(value: float, top: float, M: int) -> int:
    """Scalar form of :func:`band_indices`."""
    return int(band_indices([value], top, M)[0])


def band_bounds(sorted_desc, top: float, M: int) -> np.ndarray:
    """Slice boundaries of the bands inside a descending-sorted node array.

    Returns an integer array ``bounds`` of length ``M + 1`` such that band
    ``m`` occupies ``sorted_desc[bounds[m-1]:bounds[m]]``.  Band indices are
    nondecreasing along a descending-sorted array, so the bands are
    contiguous slices.
    """
    v = np.asarray(sorted_desc, dtype=float)
    b = band_indices(v, top, M) if v.size else np.empty(0, dtype=int)
    starts = np.searchsorted(b, np.arange(1, M + 1), side="left")
    return np.concatenate([starts, [v.size]])
