"""Naive Bayes over sparse binary features, trained on exact or noisy counts.

The model keeps, per label, the tuple count and the per-feature counts of
``F=1 and L=l``.  Private training adds Laplace noise to those counts;
everything after that is post-processing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .dataset import SparseDataset, Tuple
from .dp import PrivacyBudget, charge

MODEL_FORMAT = "privml.naive-bayes"
MODEL_VERSION = 1


@dataclass(frozen=True)
class PredictionSet:
    """True labels and predicted probabilities of a test set."""

    labels: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        p = np.asarray(self.p, dtype=np.float64)
        if labels.shape != p.shape or labels.ndim != 1:
            raise ValueError("labels and p must be 1-D arrays of equal length")
        if np.any((labels != 0) & (labels != 1)):
            raise ValueError("labels must be 0 or 1")
        if np.any(~((p >= 0.0) & (p <= 1.0))):
            raise ValueError("every p must lie in [0, 1]")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "p", p)

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return len(self) - self.n_pos

    @property
    def items(self):
        return list(zip(self.labels.tolist(), self.p.tolist()))


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    """``label_counts[l]`` and ``joint_counts[f, l]`` (count of F=f on and L=l).

    ``trained`` marks the features whose counts were released; the others
    carry zeros and must not be used for prediction.
    """

    label_counts: np.ndarray
    joint_counts: np.ndarray
    trained: np.ndarray
    smoothing: float = 1.0

    def __post_init__(self):
        if not self.smoothing > 0:
            raise ValueError("smoothing must be positive")
        lc = np.asarray(self.label_counts, dtype=np.float64)
        jc = np.asarray(self.joint_counts, dtype=np.float64)
        tr = np.asarray(self.trained, dtype=bool)
        if lc.shape != (2,) or jc.ndim != 2 or jc.shape[1] != 2 or tr.shape != (jc.shape[0],):
            raise ValueError("count shapes do not match the feature space")
        object.__setattr__(self, "label_counts", lc)
        object.__setattr__(self, "joint_counts", jc)
        object.__setattr__(self, "trained", tr)

    @property
    def num_features(self) -> int:
        return self.joint_counts.shape[0]

    @property
    def n_total(self) -> float:
        return float(self.label_counts.sum())

    def log_prior(self) -> np.ndarray:
        a = self.smoothing
        return np.log((self.label_counts + a) / (self.n_total + 2 * a))

    def log_likelihoods(self):
        """``(log P(F=1|l), log P(F=0|l))``, each of shape ``(num_features, 2)``."""
        a = self.smoothing
        on = self.joint_counts
        off = np.maximum(self.label_counts[None, :] - on, 0.0)
        denom = on + off + 2 * a
        return np.log((on + a) / denom), np.log((off + a) / denom)

    def to_json(self) -> str:
        doc = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "num_features": self.num_features,
            "smoothing": self.smoothing,
            "label_counts": self.label_counts.tolist(),
            "trained": np.flatnonzero(self.trained).tolist(),
            "joint_counts": self.joint_counts[self.trained].tolist(),
        }
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "NaiveBayesModel":
        doc = json.loads(text)
        if doc.get("format") != MODEL_FORMAT:
            raise ValueError("not a naive Bayes model document")
        if doc.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {doc.get('version')!r}")
        m = int(doc["num_features"])
        trained = np.zeros(m, dtype=bool)
        idx = np.asarray(doc["trained"], dtype=np.int64)
        trained[idx] = True
        joint = np.zeros((m, 2))
        if len(idx):
            joint[idx] = np.asarray(doc["joint_counts"], dtype=np.float64)
        return cls(np.asarray(doc["label_counts"]), joint, trained, float(doc["smoothing"]))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "NaiveBayesModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def _mask_array(mask, num_features: int) -> np.ndarray:
    if mask is None:
        return np.ones(num_features, dtype=bool)
    mask = np.asarray(getattr(mask, "selected", mask), dtype=bool)
    if mask.shape != (num_features,):
        raise ValueError("feature mask length does not match the feature space")
    return mask


def nb_train(d: SparseDataset, eps: float, rng, budget: Optional[PrivacyBudget] = None,
             feature_mask=None, smoothing: float = 1.0) -> NaiveBayesModel:
    """Fit on ``d`` restricted to ``feature_mask`` (all features by default).

    ``eps`` of 0 or infinity trains on exact counts.  Otherwise one tuple
    moves the released counts by at most ``1 + s'`` in L1, where ``s'`` is
    the tuple sparsity bound capped by the number of masked features; the
    budget is split ``1 : s'`` so both parts get Laplace((1 + s')/eps).
    Negative noisy counts are clamped to zero.
    """
    mask = _mask_array(feature_mask, d.num_features)
    n11, n10 = _kernels.label_feature_counts(d.indptr, d.indices, d.labels, d.num_features)
    pos = int(d.labels.sum())
    labels = np.array([len(d) - pos, pos], dtype=np.float64)
    joint = np.zeros((d.num_features, 2))
    joint[mask, 0] = n10[mask]
    joint[mask, 1] = n11[mask]
    if eps == 0 or math.isinf(eps):
        return NaiveBayesModel(labels, joint, mask, smoothing)
    s_eff = min(d.max_ones_per_tuple, int(mask.sum()))
    receipt = charge(budget, "train/naive-bayes", eps)
    if s_eff == 0:
        r_label, r_joint = receipt, None
    else:
        r_label, r_joint = receipt.split(1.0 / (1 + s_eff), s_eff / (1 + s_eff))
    labels = np.maximum(labels + r_label.laplace(1.0, rng, size=2), 0.0)
    if r_joint is not None:
        k = int(mask.sum())
        joint[mask] = np.maximum(joint[mask] + r_joint.laplace(s_eff, rng, size=(k, 2)), 0.0)
    return NaiveBayesModel(labels, joint, mask, smoothing)


def predict_proba(m: NaiveBayesModel, d: SparseDataset, feature_mask=None) -> np.ndarray:
    """Posterior ``P(L=1 | x)`` for every tuple, using masked features only.

    Defaults to all trained features; features outside the mask are ignored.
    """
    if d.num_features != m.num_features:
        raise ValueError("dataset and model feature spaces differ")
    mask = m.trained if feature_mask is None else _mask_array(feature_mask, m.num_features)
    if np.any(mask & ~m.trained):
        raise ValueError("mask selects features the model was not trained on")
    log_on, log_off = m.log_likelihoods()
    base = m.log_prior() + log_off[mask].sum(axis=0)
    score = np.empty((len(d), 2))
    for label in (0, 1):
        w = np.where(mask, log_on[:, label] - log_off[:, label], 0.0)
        score[:, label] = base[label] + _kernels.row_weight_sums(d.indptr, d.indices, w)
    diff = score[:, 1] - score[:, 0]
    return 1.0 / (1.0 + np.exp(-diff))


def nb_predict(m: NaiveBayesModel, t: Tuple, feature_mask=None) -> float:
    """Posterior ``P(L=1 | t)`` for a single tuple."""
    d = SparseDataset.from_tuples([(t.label, t.active_features)], num_features=m.num_features)
    return float(predict_proba(m, d, feature_mask)[0])


def predictions(m: NaiveBayesModel, d: SparseDataset, feature_mask=None) -> PredictionSet:
    return PredictionSet(d.labels, predict_proba(m, d, feature_mask))


def evaluate_accuracy(m: NaiveBayesModel, test: SparseDataset, feature_mask=None) -> float:
    """Fraction of tuples whose predicted label (``p > 0.5``) matches the truth."""
    if len(test) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    p = predict_proba(m, test, feature_mask)
    return float(np.mean((p > 0.5).astype(np.int64) == test.labels))


def majority_accuracy(labels) -> float:
    """Accuracy of always predicting the more frequent class of ``labels``."""
    labels = np.asarray(labels)
    if len(labels) == 0:
        raise ValueError("cannot evaluate on an empty test set")
    pos = float(labels.mean())
    return max(pos, 1.0 - pos)
