"""ROC curves from exact or privately released TPR/FPR sequences.

Thresholds are stored in descending order ``1 = t_0 > t_1 > ... > t_l = 0``.
Item ``p`` falls in bucket ``i`` (1-based) when ``t_{i-1} >= p > t_i``, with
``p = 0`` assigned to the last bucket.  The prefix sums of bucket counts are
then ``TP(t_i)`` and ``FP(t_i)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import _kernels
from .classifier import PredictionSet
from .dp import PrivacyBudget, laplace_tail_quantile, sample_cauchy_like
from .rangequery import _next_pow2, isotonic_project, prefix_sums, private_prefix_sums


class ThresholdMethod(str, Enum):
    FIXED_SPACE = "fixed-space"
    RECURSIVE_MEDIANS = "recursive-medians"
    ALL_PREDICTIONS = "all-predictions"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class ThresholdSet:
    thetas: np.ndarray
    method: ThresholdMethod

    def __post_init__(self):
        t = np.asarray(self.thetas, dtype=np.float64)
        if len(t) < 2 or t[0] != 1.0 or t[-1] != 0.0 or np.any(np.diff(t) >= 0):
            raise ValueError("thresholds must run strictly downward from 1 to 0")
        object.__setattr__(self, "thetas", t)
        object.__setattr__(self, "method", ThresholdMethod(self.method))

    def __len__(self) -> int:
        return len(self.thetas)

    @property
    def num_buckets(self) -> int:
        return len(self.thetas) - 1

    @classmethod
    def from_values(cls, values, method) -> "ThresholdSet":
        """Sorted, de-duplicated ``values`` in (0, 1) with both sentinels attached."""
        v = np.asarray(values, dtype=np.float64)
        v = v[(v > 0.0) & (v < 1.0)]
        return cls(np.unique(np.concatenate(([0.0, 1.0], v)))[::-1].copy(), method)


@dataclass(frozen=True, eq=False)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    auc: float
    thresholds: ThresholdSet

    @property
    def points(self) -> np.ndarray:
        return np.column_stack((self.fpr, self.tpr))


@dataclass(frozen=True)
class BoundReport:
    X: float
    Y: float
    delta: float
    upper_area: float
    lower_area: float
    bias: float

    def contains(self, area: float) -> bool:
        return self.lower_area <= area <= self.upper_area


def trapezoid_area(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1])) / 2.0)


def _require_both_classes(p: PredictionSet) -> None:
    if p.n_pos < 1 or p.n_neg < 1:
        raise ValueError("ROC needs at least one item of each class")


def bucket_counts(p: PredictionSet, thresholds: ThresholdSet):
    """``(x_tp, x_fp)``: per-bucket counts of positive and negative items."""
    asc = thresholds.thetas[::-1]
    ell = thresholds.num_buckets
    bucket = ell - np.searchsorted(asc, p.p, side="left")  # 0-based
    bucket = np.clip(bucket, 0, ell - 1)
    x_tp = np.bincount(bucket[p.labels == 1], minlength=ell).astype(np.float64)
    x_fp = np.bincount(bucket[p.labels == 0], minlength=ell).astype(np.float64)
    return x_tp, x_fp


def _rates(prefix: np.ndarray) -> np.ndarray:
    """``q_i / q_l`` for ``i = 1..l``; the denominator is floored at 1."""
    return prefix / max(prefix[-1], 1.0)


def _finish(tpr_raw, fpr_raw, thresholds, postprocess=True) -> RocCurve:
    if postprocess:
        tpr_raw = isotonic_project(tpr_raw)
        fpr_raw = isotonic_project(fpr_raw)
    tpr = np.concatenate(([0.0], tpr_raw))
    fpr = np.concatenate(([0.0], fpr_raw))
    tpr[-1] = 1.0
    fpr[-1] = 1.0
    return RocCurve(fpr, tpr, trapezoid_area(fpr, tpr), thresholds)


def roc_at_thresholds(p: PredictionSet, thresholds: ThresholdSet) -> RocCurve:
    """Exact curve evaluated at the given thresholds."""
    _require_both_classes(p)
    x_tp, x_fp = bucket_counts(p, thresholds)
    return _finish(_rates(prefix_sums(x_tp)), _rates(prefix_sums(x_fp)), thresholds)


def all_predictions(p: PredictionSet) -> ThresholdSet:
    """One threshold per distinct prediction value.

    Items at exactly 0 would otherwise share the lowest bucket with the
    smallest positive value, so a threshold just above 0 separates them.
    """
    values = p.p
    if len(values) and values.min() <= 0.0:
        values = np.append(values, np.nextafter(0.0, 1.0))
    return ThresholdSet.from_values(values, ThresholdMethod.ALL_PREDICTIONS)


def exact_roc(p: PredictionSet) -> RocCurve:
    """Exact curve over every distinct prediction value."""
    _require_both_classes(p)
    return roc_at_thresholds(p, all_predictions(p))


def choose_fixed_space(n: int, alpha: float) -> ThresholdSet:
    """Evenly spaced grid ``{0, 1/L, ..., (L-1)/L, 1}`` with ``L = floor(alpha * n)``."""
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    L = int(math.floor(alpha * n))
    if L < 1:
        raise ValueError("alpha * n must be at least 1")
    return ThresholdSet(np.arange(L, -1, -1) / L, ThresholdMethod.FIXED_SPACE)


def smooth_sensitivity_median(p, beta: float, lo: float = 0.0, hi: float = 1.0) -> float:
    """Beta-smooth sensitivity of the lower median of sorted ``p`` within ``[lo, hi]``."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    if not beta > 0:
        raise ValueError("beta must be positive")
    p = np.asarray(p, dtype=np.float64)
    if len(p) > 1 and np.any(np.diff(p) < 0):
        raise ValueError("values must be sorted ascending")
    return float(_kernels.smooth_sensitivity_median(p, beta, lo, hi))


def choose_recursive_medians(p: PredictionSet, eps1: float, k: int, rng,
                             budget: Optional[PrivacyBudget] = None) -> ThresholdSet:
    """``k`` levels of noisy medians, each level on disjoint sub-ranges.

    Each level gets ``eps1 / k``; the sub-ranges of one level are disjoint so
    they compose in parallel.  Empty or out-of-range medians fall back to the
    range midpoint.  Returns up to ``2^k - 1`` internal thresholds.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if budget is None:
        budget = PrivacyBudget(eps1)
    receipt = budget.spend("roc/recursive-medians", eps1)
    eps_level = receipt.epsilon / k
    beta = eps_level / 2.0
    found = []

    # preorder walk; the RNG stream is consumed in this fixed order
    def walk(vals, lo, hi, depth):
        if depth == 0:
            return
        if len(vals) == 0:
            m = (lo + hi) / 2.0
        else:
            m = float(vals[(len(vals) - 1) // 2])
            if not receipt.noiseless:
                s_star = smooth_sensitivity_median(vals, beta, lo, hi)
                m += 8.0 * s_star / eps_level * sample_cauchy_like(rng)
            if m <= lo or m >= hi:
                m = (lo + hi) / 2.0
        found.append(m)
        walk(vals[vals < m], lo, m, depth - 1)
        walk(vals[vals > m], m, hi, depth - 1)

    walk(np.sort(p.p), 0.0, 1.0, k)
    return ThresholdSet.from_values(found, ThresholdMethod.RECURSIVE_MEDIANS)


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise ValueError("epsilon must be positive")


def priroc(p: PredictionSet, eps: float, eps1_fraction: float, chooser, k_or_alpha, rng,
           budget: Optional[PrivacyBudget] = None, postprocess: bool = True,
           thresholds: Optional[ThresholdSet] = None) -> RocCurve:
    """Private ROC curve: choose thresholds, release noisy prefix counts, smooth.

    ``chooser`` is ``"fixed-space"`` (``k_or_alpha`` = alpha, no budget) or
    ``"recursive-medians"`` (``k_or_alpha`` = k, ``eps1_fraction * eps``).
    A ready-made ``thresholds`` set overrides the chooser and costs nothing.
    The rest of the budget is split evenly between the positive and negative
    bucket vectors.  ``postprocess=False`` returns the raw rate sequences
    with only the endpoints pinned.
    """
    _check_eps(eps)
    _require_both_classes(p)
    if budget is None:
        budget = PrivacyBudget(eps)
    eps1 = 0.0
    if thresholds is None:
        method = ThresholdMethod(chooser)
        if method is ThresholdMethod.FIXED_SPACE:
            thresholds = choose_fixed_space(len(p), float(k_or_alpha))
        elif method is ThresholdMethod.RECURSIVE_MEDIANS:
            if not 0.0 < eps1_fraction < 1.0:
                raise ValueError("recursive medians needs eps1_fraction in (0, 1)")
            eps1 = eps1_fraction * eps
            thresholds = choose_recursive_medians(p, eps1, int(k_or_alpha), rng, budget)
        else:
            raise ValueError(f"unsupported threshold chooser {chooser!r}")
    eps2 = eps if math.isinf(eps) else eps - eps1
    x_tp, x_fp = bucket_counts(p, thresholds)
    q_tp = private_prefix_sums(x_tp, eps2 / 2, rng, budget, "roc/privelet-tp")
    q_fp = private_prefix_sums(x_fp, eps2 / 2, rng, budget, "roc/privelet-fp")
    return _finish(_rates(q_tp), _rates(q_fp), thresholds, postprocess)


def empirical_quantile_thresholds(p: PredictionSet, t: int) -> ThresholdSet:
    """``t`` internal thresholds at the empirical ``j/(t+1)`` quantiles (no budget)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return ThresholdSet.from_values(np.quantile(p.p, np.arange(1, t + 1) / (t + 1)),
                                    ThresholdMethod.CUSTOM)


def laplace_roc_baseline(p: PredictionSet, thresholds: ThresholdSet, eps: float, rng,
                         budget: Optional[PrivacyBudget] = None) -> RocCurve:
    """Laplace noise on every ``TP(theta)``, ``FP(theta)`` and on both class sizes.

    One item changes at most ``|thresholds|`` counts of one kind plus one
    class size; every released value gets Laplace((2 |thresholds| + 1) / eps).
    Rates are noisy counts over noisy class sizes.  The thresholds themselves
    are taken as given and charged nothing.
    """
    _check_eps(eps)
    _require_both_classes(p)
    if budget is None:
        budget = PrivacyBudget(eps)
    receipt = budget.spend("roc/laplace-baseline", eps)
    x_tp, x_fp = bucket_counts(p, thresholds)
    sens = 2 * len(thresholds) + 1
    q_tp = prefix_sums(x_tp) + receipt.laplace(sens, rng, size=thresholds.num_buckets)
    q_fp = prefix_sums(x_fp) + receipt.laplace(sens, rng, size=thresholds.num_buckets)
    n_pos = p.n_pos + receipt.laplace(sens, rng)
    n_neg = p.n_neg + receipt.laplace(sens, rng)
    return _finish(q_tp / max(n_pos, 1.0), q_fp / max(n_neg, 1.0), thresholds)


def theorem5_bounds(curve: RocCurve, n_pos: int, n_neg: int, num_thetas: int, eps: float,
                    delta: float, bias: float = 0.0) -> BoundReport:
    """Area band around ``curve`` from a per-point rate error of ``X`` (TPR), ``Y`` (FPR).

    ``eps`` is the budget of one Privelet release (half of the rate budget)
    and ``num_thetas`` the number of buckets it covers; the prefix-query
    sensitivity is ``1 + log2`` of the padded bucket count.
    """
    if n_pos < 1 or n_neg < 1 or num_thetas < 1:
        raise ValueError("class sizes and threshold count must be positive")
    if bias < 0:
        raise ValueError("bias must be non-negative")
    if math.isinf(eps):
        X = Y = 0.0
    else:
        _check_eps(eps)
        scale = (1.0 + math.log2(_next_pow2(num_thetas))) / eps
        tail = 2.0 * laplace_tail_quantile(scale, delta)
        X, Y = tail / n_pos, tail / n_neg
    if X >= 1.0 or Y >= 1.0:
        return BoundReport(X, Y, delta, 1.0, 0.0, bias)
    f, t = curve.fpr, curve.tpr
    up_f, up_t = np.maximum(0.0, f - Y), np.minimum(1.0, t + X)
    lo_f, lo_t = np.minimum(1.0, f + Y), np.maximum(0.0, t - X)
    for xs, ys in ((up_f, up_t), (lo_f, lo_t)):
        xs[0], ys[0], xs[-1], ys[-1] = 0.0, 0.0, 1.0, 1.0
    upper = min(1.0, trapezoid_area(up_f, up_t) + bias)
    lower = max(0.0, trapezoid_area(lo_f, lo_t) - bias)
    return BoundReport(X, Y, delta, upper, lower, bias)


def _one_sided_limits(f, t, x):
    """Left and right limits of a monotone piecewise-linear curve at ``x``."""
    lo = np.searchsorted(f, x, side="left")
    hi = np.searchsorted(f, x, side="right")
    on_vertex = hi > lo
    a = np.clip(lo - 1, 0, len(f) - 1)
    b = np.clip(lo, 0, len(f) - 1)
    width = f[b] - f[a]
    frac = np.divide(x - f[a], width, out=np.zeros_like(x), where=width > 0)
    interp = t[a] + (t[b] - t[a]) * frac
    left = np.where(on_vertex, t[b], interp)
    right = np.where(on_vertex, t[np.clip(hi - 1, 0, len(f) - 1)], interp)
    return left, right


def curve_l1_distance(a: RocCurve, b: RocCurve) -> float:
    """Area between two monotone ROC curves, each read as TPR over FPR."""
    grid = np.unique(np.concatenate((a.fpr, b.fpr)))
    la, ra = _one_sided_limits(a.fpr, a.tpr, grid)
    lb, rb = _one_sided_limits(b.fpr, b.tpr, grid)
    # on each grid interval the gap is linear from u (right end of the
    # left vertex) to v (left end of the right vertex)
    u = (ra - rb)[:-1]
    v = (la - lb)[1:]
    w = np.diff(grid)
    same = u * v >= 0
    mag = np.abs(u) + np.abs(v)
    crossing = np.divide(u * u + v * v, 2.0 * mag, out=np.zeros_like(mag), where=mag > 0)
    return float(np.sum(np.where(same, mag / 2.0, crossing) * w))


def discretization_bias(p: PredictionSet, thresholds: ThresholdSet) -> float:
    """Area lost by evaluating the exact curve only at ``thresholds`` (analysis only)."""
    return abs(exact_roc(p).auc - roc_at_thresholds(p, thresholds).auc)


def write_curve_csv(curve: RocCurve, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["threshold", "fpr", "tpr"])
        for th, f, t in zip(curve.thresholds.thetas, curve.fpr, curve.tpr):
            w.writerow([repr(float(th)), repr(float(f)), repr(float(t))])
