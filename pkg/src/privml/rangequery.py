"""Haar-wavelet release of a count vector and prefix-sum queries over it.

Coefficients live in heap order: ``details[0]`` is the root (spanning all
``padded_len`` leaves), ``details[1:3]`` its two children, and so on down to
the ``padded_len / 2`` nodes that span two leaves each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dp import PrivacyBudget, charge


@dataclass(frozen=True, eq=False)
class HaarCoefficients:
    base: float
    details: np.ndarray
    padded_len: int
    length: int

    @property
    def levels(self) -> int:
        return int(round(math.log2(self.padded_len)))

    def node_spans(self) -> np.ndarray:
        """Number of leaves under each detail node, in heap order."""
        spans = [np.full(2 ** j, self.padded_len >> j) for j in range(self.levels)]
        return np.concatenate(spans) if spans else np.zeros(0, dtype=np.int64)


def _next_pow2(m: int) -> int:
    return 1 if m <= 1 else 1 << (m - 1).bit_length()


def haar_forward(x) -> HaarCoefficients:
    """Zero-pad to a power of two, then take means and half-differences of means."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) < 1:
        raise ValueError("need a non-empty 1-D count vector")
    size = _next_pow2(len(x))
    cur = np.zeros(size)
    cur[:len(x)] = x
    levels = []
    # bottom-up: each pass halves the vector of block means
    while len(cur) > 1:
        left, right = cur[0::2], cur[1::2]
        levels.append((left - right) / 2.0)
        cur = (left + right) / 2.0
    details = np.concatenate(levels[::-1]) if levels else np.zeros(0)
    return HaarCoefficients(float(cur[0]), details, size, len(x))


def haar_inverse(h: HaarCoefficients, truncate: bool = True) -> np.ndarray:
    cur = np.array([h.base])
    offset = 0
    for j in range(h.levels):
        d = h.details[offset:offset + 2 ** j]
        offset += 2 ** j
        nxt = np.empty(2 * len(cur))
        nxt[0::2] = cur + d
        nxt[1::2] = cur - d
        cur = nxt
    return cur[:h.length] if truncate else cur


def privelet_scale(padded_len: int, eps: float) -> float:
    """``lambda = (1 + log2 m) / eps``; a coefficient of weight ``w`` gets Laplace(lambda / w)."""
    return (1.0 + math.log2(padded_len)) / eps


def privelet_perturb(h: HaarCoefficients, eps: float, rng,
                     budget: Optional[PrivacyBudget] = None,
                     label: str = "rangequery/privelet") -> HaarCoefficients:
    """Laplace noise on each coefficient, weighted by the number of leaves it spans.

    Changing one count by 1 moves the base by ``1/m`` and a node spanning
    ``2^l`` leaves by ``2^-l``; with weights ``m`` and ``2^l`` the weighted
    L1 change is at most ``1 + log2 m``.
    """
    receipt = charge(budget, label, eps)
    if receipt.noiseless:
        return HaarCoefficients(h.base, h.details.copy(), h.padded_len, h.length)
    weight_total = 1.0 + math.log2(h.padded_len)
    base = h.base + receipt.laplace(weight_total / h.padded_len, rng)
    spans = h.node_spans().astype(np.float64)
    details = h.details + receipt.laplace(weight_total, rng, size=len(spans)) / spans
    return HaarCoefficients(base, details, h.padded_len, h.length)


def one_sided_query(x, j: int) -> float:
    """Sum of the first ``j`` entries (1-based, ``1 <= j <= len(x)``)."""
    x = np.asarray(x, dtype=np.float64)
    if not 1 <= j <= len(x):
        raise IndexError(f"prefix length must lie in [1, {len(x)}], got {j}")
    return float(x[:j].sum())


def prefix_sums(x) -> np.ndarray:
    """All one-sided queries ``q_1 .. q_m`` at once."""
    return np.cumsum(np.asarray(x, dtype=np.float64))


def private_prefix_sums(x, eps: float, rng, budget: Optional[PrivacyBudget] = None,
                        label: str = "rangequery/privelet") -> np.ndarray:
    """Noisy ``q_1 .. q_m`` from a Privelet release of ``x``."""
    h = privelet_perturb(haar_forward(x), eps, rng, budget, label)
    return prefix_sums(haar_inverse(h))


def isotonic_project(y) -> np.ndarray:
    """L2 projection onto non-decreasing sequences, then clipped to [0, 1]."""
    return np.clip(_kernels.pav(np.asarray(y, dtype=np.float64)), 0.0, 1.0)
