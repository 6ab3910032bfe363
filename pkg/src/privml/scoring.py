"""Per-feature label/feature counts, filter scores, and their sensitivities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .dataset import SparseDataset


class ScoreKind(str, Enum):
    TC = "tc"
    DC = "dc"
    PI = "pi"
    IG = "ig"


class NeighborModel(str, Enum):
    UNBOUNDED = "unbounded"
    BOUNDED = "bounded"


@dataclass(frozen=True)
class FeatureCounts:
    """Contingency counts of one feature against the label (scalars or arrays).

    ``n11`` counts F=1 and L=1, ``n10`` F=1 and L=0, ``n01`` F=0 and L=1,
    ``n00`` F=0 and L=0.
    """

    n11: np.ndarray
    n10: np.ndarray
    n01: np.ndarray
    n00: np.ndarray

    def __len__(self) -> int:
        return len(np.atleast_1d(self.n11))

    def __getitem__(self, i) -> "FeatureCounts":
        return FeatureCounts(self.n11[i], self.n10[i], self.n01[i], self.n00[i])

    @property
    def n(self):
        return self.n11 + self.n10 + self.n01 + self.n00

    def flipped(self) -> "FeatureCounts":
        """Counts of the complemented feature (F swapped with 1-F)."""
        return FeatureCounts(self.n01, self.n00, self.n11, self.n10)


def extract_counts(d: SparseDataset) -> FeatureCounts:
    n11, n10 = _kernels.label_feature_counts(d.indptr, d.indices, d.labels, d.num_features)
    pos = int(d.labels.sum())
    neg = len(d) - pos
    return FeatureCounts(n11, n10, pos - n11, neg - n10)


def _out(x):
    return float(x) if np.ndim(x) == 0 else np.asarray(x, dtype=np.float64)


def score_tc(c: FeatureCounts):
    return _out(np.add(c.n11, c.n10))


def score_dc(c: FeatureCounts):
    return _out(np.abs(np.subtract(c.n11, c.n10)))


def score_pi(c: FeatureCounts):
    return _out(np.maximum(np.abs(np.subtract(c.n11, c.n10)), np.abs(np.subtract(c.n01, c.n00))))


def _entropy(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    t = a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        pa = np.where(t > 0, a / t, 0.0)
        pb = np.where(t > 0, b / t, 0.0)
        ha = np.where(pa > 0, -pa * np.log(np.where(pa > 0, pa, 1.0)), 0.0)
        hb = np.where(pb > 0, -pb * np.log(np.where(pb > 0, pb, 1.0)), 0.0)
    return ha + hb


def score_ig(c: FeatureCounts):
    """Information gain in nats, with the 0 ln 0 = 0 convention."""
    n = np.asarray(c.n, dtype=np.float64)
    if np.any(n <= 0):
        raise ValueError("information gain is undefined on an empty dataset")
    h = _entropy(np.add(c.n11, c.n01), np.add(c.n10, c.n00))
    ones = np.add(c.n11, c.n10)
    zeros = np.add(c.n01, c.n00)
    cond = ones / n * _entropy(c.n11, c.n10) + zeros / n * _entropy(c.n01, c.n00)
    return _out(np.clip(h - cond, 0.0, h))


SCORERS = {
    ScoreKind.TC: score_tc,
    ScoreKind.DC: score_dc,
    ScoreKind.PI: score_pi,
    ScoreKind.IG: score_ig,
}


def ig_sensitivity(n_bound: int) -> float:
    # conservative stand-in for the O(log n) bound
    return math.log(n_bound) + 1.0


def sensitivity_profile(kind, s: int, num_features: int, n_bound: int,
                        model=NeighborModel.UNBOUNDED) -> Tuple[float, int]:
    """Return ``(S, Delta)``: per-score sensitivity and number of affected scores."""
    kind = ScoreKind(kind)
    model = NeighborModel(model)
    if n_bound < 1:
        raise ValueError("n_bound must be >= 1")
    S = ig_sensitivity(n_bound) if kind is ScoreKind.IG else 1.0
    if model is NeighborModel.UNBOUNDED:
        delta = s if kind in (ScoreKind.TC, ScoreKind.DC) else num_features
        return S, int(delta)
    if kind is ScoreKind.PI:
        # a swapped tuple that changes label moves n01 and n00 of every
        # feature, so each purity score can shift by 2
        return 2.0, int(num_features)
    return S, int(2 * s)


@dataclass(frozen=True)
class ScoreTable:
    scores: np.ndarray
    counts: FeatureCounts
    score_kind: ScoreKind
    per_query_sensitivity: float
    affected_queries: int

    def __len__(self) -> int:
        return len(self.scores)

    @property
    def noise_sensitivity(self) -> float:
        """``S * Delta``: L1 sensitivity of the whole score vector."""
        return self.per_query_sensitivity * self.affected_queries

    def rescored(self) -> np.ndarray:
        return np.atleast_1d(SCORERS[self.score_kind](self.counts))


def score_table(d: SparseDataset, kind, n_bound: Optional[int] = None,
                model=NeighborModel.UNBOUNDED) -> ScoreTable:
    """Score every feature of ``d``.

    ``n_bound`` is the public upper bound on dataset size used by the IG
    sensitivity; it defaults to ``len(d)``, which is only appropriate when the
    size itself is public.  Delta uses ``d.max_ones_per_tuple``, so a dataset
    passed through :func:`sample_features` is charged with ``r``.
    """
    kind = ScoreKind(kind)
    counts = extract_counts(d)
    n_bound = max(1, len(d) if n_bound is None else n_bound)
    S, delta = sensitivity_profile(kind, d.max_ones_per_tuple, d.num_features, n_bound, model)
    scores = np.atleast_1d(SCORERS[kind](counts)) if len(d) else np.zeros(d.num_features)
    return ScoreTable(scores, counts, kind, S, max(1, delta))

