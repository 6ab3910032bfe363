"""Private feature selection over a :class:`ScoreTable`.

All selectors take ``eps`` and charge it to ``budget`` (a fresh one when
omitted).  ``eps = math.inf`` gives the exact, noiseless selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dp import PrivacyBudget, Receipt, charge
from .scoring import ScoreKind, ScoreTable


@dataclass(frozen=True, eq=False)
class SelectionMask:
    selected: np.ndarray
    method: str
    epsilon_used: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "selected", np.asarray(self.selected, dtype=bool))

    def __len__(self) -> int:
        return len(self.selected)

    @property
    def count(self) -> int:
        return int(self.selected.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.selected)


def exact_threshold(t: ScoreTable, tau: float) -> SelectionMask:
    return SelectionMask(t.scores >= tau, "exact")


def exact_topk(t: ScoreTable, k: int) -> SelectionMask:
    return SelectionMask(_topk_mask(t.scores, k), "exact-topk")


def _topk_mask(values, k):
    m = len(values)
    if not 0 <= k <= m:
        raise ValueError(f"k must lie in [0, {m}], got {k}")
    order = np.lexsort((np.arange(m), -np.asarray(values)))
    mask = np.zeros(m, dtype=bool)
    mask[order[:k]] = True
    return mask


def select_score_perturbation(t: ScoreTable, tau: float, eps: float, rng,
                              budget: Optional[PrivacyBudget] = None) -> SelectionMask:
    """Laplace(S*Delta/eps) on every score, keep noisy scores >= tau."""
    receipt = charge(budget, "select/score-perturbation", eps)
    noisy = t.scores + receipt.laplace(t.noise_sensitivity, rng, size=len(t))
    return SelectionMask(noisy >= tau, "score-perturbation", eps)


def select_topk_perturbation(t: ScoreTable, k: int, eps: float, rng,
                             budget: Optional[PrivacyBudget] = None) -> SelectionMask:
    """Top-``k`` by Laplace-perturbed score; ties go to the lowest index."""
    if not 0 <= k <= len(t):
        raise ValueError(f"k must lie in [0, {len(t)}], got {k}")
    receipt = charge(budget, "select/topk-perturbation", eps)
    noisy = t.scores + receipt.laplace(t.noise_sensitivity, rng, size=len(t))
    return SelectionMask(_topk_mask(noisy, k), "topk-perturbation", eps)


def ptt_scale(t: ScoreTable, eps: float, monotone_hint: bool = False) -> float:
    """Threshold-noise scale for private threshold testing at privacy level ``eps``.

    The noisy-threshold comparison costs twice the per-query sensitivity in
    general; for monotone count queries (TC) against a constant threshold it
    costs it once.
    """
    if monotone_hint and t.score_kind is not ScoreKind.TC:
        raise ValueError("monotone_hint only applies to the TC score")
    factor = 1.0 if monotone_hint else 2.0
    return factor * t.per_query_sensitivity / eps


def select_ptt(t: ScoreTable, tau: float, eps: float, monotone_hint: bool, rng,
               budget: Optional[PrivacyBudget] = None) -> SelectionMask:
    """Private threshold testing: noise the threshold once, compare true scores.

    With ``monotone_hint`` (TC only) every score moves in the same direction
    under a neighbor, and Laplace(S/eps) on the threshold gives eps-DP.
    Without it the threshold gets Laplace(2S/eps), but that is only a
    guarantee when neighbor scores never move in opposite directions: for DC,
    PI or IG one added tuple can take scores (5, 7) to (6, 6), and the output
    "second feature only" then has zero probability on one side.
    """
    if monotone_hint and t.score_kind is not ScoreKind.TC:
        raise ValueError("monotone_hint only applies to the TC score")
    receipt = charge(budget, "select/ptt", eps)
    factor = 1.0 if monotone_hint else 2.0
    noisy_tau = tau + receipt.laplace(factor * t.per_query_sensitivity, rng)
    return SelectionMask(t.scores >= noisy_tau, "ptt", eps)


def select_noisycut(t: ScoreTable, tau: float, eps: float, rng,
                    budget: Optional[PrivacyBudget] = None) -> SelectionMask:
    """Noise both the threshold and each score, half the budget each."""
    receipt = charge(budget, "select/noisycut", eps)
    r_tau, r_query = receipt.split(0.5, 0.5)
    noisy_tau = tau + r_tau.laplace(t.per_query_sensitivity, rng)
    noisy = t.scores + r_query.laplace(t.per_query_sensitivity, rng, size=len(t))
    return SelectionMask(noisy >= noisy_tau, "noisycut", eps)


@dataclass
class ClusterState:
    centers: np.ndarray
    assignments: np.ndarray
    rounds: int


def diagonal_init(k: int, dim: int, domain_high: float) -> np.ndarray:
    """Data-independent centers spread evenly along the diagonal of [0, domain_high]^dim."""
    q = (np.arange(k) + 0.5) / k
    return np.repeat((q * domain_high)[:, None], dim, axis=1)


def private_kmeans(points, k: int, rounds: int, eps: float, sum_sensitivity: float, rng,
                   domain_high: Optional[float] = None,
                   budget: Optional[PrivacyBudget] = None,
                   receipt: Optional[Receipt] = None) -> ClusterState:
    """Lloyd iterations with Laplace-noised cluster sizes and coordinate sums.

    Each round gets ``eps / rounds``, split evenly between the size release
    (sensitivity 1) and the sum release (sensitivity ``sum_sensitivity``).
    A cluster whose noisy size is below 1/2 keeps its previous center; other
    sizes are floored at 1 before dividing.  ``domain_high`` must be public;
    it may only be omitted in noiseless mode.
    """
    if k < 1 or rounds < 1:
        raise ValueError("k and rounds must both be >= 1")
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError("points must be a 2-D array")
    if receipt is None:
        receipt = charge(budget, "select/kmeans", eps)
    if domain_high is None:
        if not receipt.noiseless:
            raise ValueError("private k-means needs a public domain bound")
        domain_high = float(points.max()) if len(points) else 1.0
    dim = points.shape[1]
    centers = diagonal_init(k, dim, domain_high)
    assign = np.zeros(len(points), dtype=np.int64)
    per_round = receipt.split(*([1.0 / rounds] * rounds)) if rounds > 1 else [receipt]
    for r in per_round:
        r_count, r_sum = r.split(0.5, 0.5)
        assign = _kernels.nearest_center(points, centers)
        sizes = np.bincount(assign, minlength=k).astype(np.float64)
        sums = np.zeros((k, dim))
        np.add.at(sums, assign, points)
        noisy_sizes = sizes + r_count.laplace(1.0, rng, size=k)
        noisy_sums = sums + r_sum.laplace(sum_sensitivity, rng, size=(k, dim))
        live = noisy_sizes >= 0.5
        centers = centers.copy()
        centers[live] = noisy_sums[live] / np.maximum(noisy_sizes[live], 1.0)[:, None]
    return ClusterState(centers, assign, rounds)


def center_scores(kind: ScoreKind, centers: np.ndarray) -> np.ndarray:
    """Score of a cluster center given as ``(n10, n11)`` coordinates."""
    x, y = centers[:, 0], centers[:, 1]
    if kind is ScoreKind.TC:
        return x + y
    if kind is ScoreKind.DC:
        return np.abs(y - x)
    raise ValueError(f"cluster selection supports TC and DC, not {kind.value}")


def select_cluster(t: ScoreTable, k: int, rounds: int, tau: float, eps: float, rng,
                   budget: Optional[PrivacyBudget] = None,
                   domain_high: Optional[float] = None) -> SelectionMask:
    """Cluster features on their ``(n10, n11)`` counts; accept whole clusters.

    ``domain_high`` defaults to the dataset size carried by the counts.
    """
    kind = ScoreKind(t.score_kind)
    if kind not in (ScoreKind.TC, ScoreKind.DC):
        raise ValueError(f"cluster selection supports TC and DC, not {kind.value}")
    points = np.column_stack((t.counts.n10, t.counts.n11)).astype(np.float64)
    if domain_high is None:
        n = np.atleast_1d(t.counts.n)
        domain_high = float(n[0]) if len(n) else 1.0
    receipt = charge(budget, "select/cluster", eps)
    state = private_kmeans(points, k, rounds, eps, t.noise_sensitivity, rng,
                           domain_high=max(domain_high, 1.0), receipt=receipt)
    accepted = center_scores(kind, state.centers) >= tau
    return SelectionMask(accepted[state.assignments], "cluster", eps)


def selection_metrics(truth, got):
    """``(precision, recall, F1)`` of ``got`` against ``truth``.

    An empty selection has precision 1 (it contains no false positives) and
    an empty truth set has recall 1; F1 is 0 when both ratios are 0.
    """
    truth = np.asarray(getattr(truth, "selected", truth), dtype=bool)
    got = np.asarray(getattr(got, "selected", got), dtype=bool)
    if truth.shape != got.shape:
        raise ValueError("masks must have the same length")
    inter = int((truth & got).sum())
    n_got, n_truth = int(got.sum()), int(truth.sum())
    pre = inter / n_got if n_got else 1.0
    rec = inter / n_truth if n_truth else 1.0
    f1 = 2 * pre * rec / (pre + rec) if pre + rec > 0 else 0.0
    return pre, rec, f1
