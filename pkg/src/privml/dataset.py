"""Sparse binary datasets: ingestion, feature sampling, folds, synthetic data.

A dataset is stored in CSR form (``indptr``/``indices``) with one binary label
per row.  The row-wise view is available through :attr:`SparseDataset.tuples`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

HEADER_PREFIX = "#features"


class ParseError(ValueError):
    """Malformed sparse-format input; ``lineno`` is 1-based."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ValidationError(ValueError):
    """Well-formed input that violates a dataset invariant."""


@dataclass(frozen=True)
class Tuple:
    label: int
    active_features: tuple


def _frozen(a, dtype):
    a = np.ascontiguousarray(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SparseDataset:
    labels: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    num_features: int
    max_ones_per_tuple: int

    def __post_init__(self):
        object.__setattr__(self, "labels", _frozen(self.labels, np.int64))
        object.__setattr__(self, "indptr", _frozen(self.indptr, np.int64))
        object.__setattr__(self, "indices", _frozen(self.indices, np.int64))
        if len(self.indptr) != len(self.labels) + 1:
            raise ValidationError("indptr must have one entry more than labels")
        if np.any((self.labels != 0) & (self.labels != 1)):
            raise ValidationError("labels must be 0 or 1")
        if len(self.indices) and (self.indices.min() < 0 or self.indices.max() >= self.num_features):
            raise ValidationError("feature index out of range")
        lengths = np.diff(self.indptr)
        if len(lengths) and lengths.max() > self.max_ones_per_tuple:
            raise ValidationError("tuple exceeds max_ones_per_tuple")
        # strictly increasing inside each row
        if len(self.indices) > 1:
            step = np.diff(self.indices)
            same_row = np.ones(len(step), dtype=bool)
            starts = self.indptr[1:-1]
            starts = starts[(starts > 0) & (starts < len(self.indices))]
            same_row[starts - 1] = False
            if np.any(step[same_row] <= 0):
                raise ValidationError("feature indices within a tuple must be strictly increasing")

    @classmethod
    def from_tuples(cls, tuples: Iterable, num_features: Optional[int] = None,
                    max_ones_per_tuple: Optional[int] = None) -> "SparseDataset":
        """Build from ``(label, features)`` pairs; features are sorted and de-duplicated."""
        labels, indptr, indices = [], [0], []
        for item in tuples:
            label, feats = (item.label, item.active_features) if isinstance(item, Tuple) else item
            feats = sorted(set(int(f) for f in feats))
            labels.append(int(label))
            indices.extend(feats)
            indptr.append(len(indices))
        if num_features is None:
            num_features = (max(indices) + 1) if indices else 0
        lengths = np.diff(indptr)
        observed = int(lengths.max()) if len(lengths) else 0
        if max_ones_per_tuple is None:
            max_ones_per_tuple = observed
        return cls(np.array(labels, dtype=np.int64), np.array(indptr), np.array(indices, dtype=np.int64),
                   int(num_features), int(max_ones_per_tuple))

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def tuples(self) -> List[Tuple]:
        return [Tuple(int(self.labels[i]),
                      tuple(int(f) for f in self.indices[self.indptr[i]:self.indptr[i + 1]]))
                for i in range(len(self))]

    def row(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def subset(self, rows: Sequence[int]) -> "SparseDataset":
        """Rows ``rows`` (in that order) over the same feature space and sparsity bound."""
        rows = np.asarray(rows, dtype=np.int64)
        lengths = np.diff(self.indptr)[rows]
        indptr = np.concatenate(([0], np.cumsum(lengths)))
        # entry j of output row i comes from position indptr[rows[i]] + j
        take = np.repeat(self.indptr[rows] - indptr[:-1], lengths) + np.arange(indptr[-1])
        return SparseDataset(self.labels[rows], indptr, self.indices[take],
                             self.num_features, self.max_ones_per_tuple)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((len(self), self.num_features), dtype=np.int8)
        rows = np.repeat(np.arange(len(self)), np.diff(self.indptr))
        out[rows, self.indices] = 1
        return out

    def same_tuples(self, other: "SparseDataset") -> bool:
        return (np.array_equal(self.labels, other.labels)
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))


def _parse_int(token: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"invalid {what} {token!r}") from None


def load_sparse(path) -> SparseDataset:
    """Read ``<label> <idx>:1 ...`` lines, with an optional ``#features N`` header."""
    declared = None
    labels, indptr, indices = [], [0], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line.split()
                if parts[0] == HEADER_PREFIX:
                    if len(parts) != 2:
                        raise ParseError(lineno, "header must be '#features N'")
                    declared = _parse_int(parts[1], lineno, "feature count")
                    if declared < 0:
                        raise ParseError(lineno, "feature count must be non-negative")
                continue
            tokens = line.split()
            label = _parse_int(tokens[0], lineno, "label")
            if label not in (0, 1):
                raise ValidationError(f"line {lineno}: label must be 0 or 1, got {label}")
            feats = []
            for tok in tokens[1:]:
                idx, sep, val = tok.partition(":")
                if not sep:
                    raise ParseError(lineno, f"expected idx:1, got {tok!r}")
                if val != "1":
                    raise ParseError(lineno, f"feature values must be 1, got {tok!r}")
                i = _parse_int(idx, lineno, "feature index")
                if i < 0:
                    raise ParseError(lineno, f"negative feature index {i}")
                feats.append(i)
            if len(set(feats)) != len(feats):
                raise ParseError(lineno, "duplicate feature index")
            feats.sort()
            if declared is not None and feats and feats[-1] >= declared:
                raise ParseError(lineno, f"feature index {feats[-1]} exceeds declared {declared}")
            labels.append(label)
            indices.extend(feats)
            indptr.append(len(indices))
    num_features = declared if declared is not None else ((max(indices) + 1) if indices else 0)
    lengths = np.diff(indptr)
    s = int(lengths.max()) if len(lengths) else 0
    return SparseDataset(np.array(labels, dtype=np.int64), np.array(indptr),
                         np.array(indices, dtype=np.int64), num_features, s)


def dump_sparse(d: SparseDataset, path) -> None:
    """Write ``d`` in the sparse text format, always with a ``#features`` header."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{HEADER_PREFIX} {d.num_features}\n")
        for i in range(len(d)):
            feats = " ".join(f"{f}:1" for f in d.row(i))
            fh.write(f"{d.labels[i]} {feats}".rstrip() + "\n")


def sample_features(d: SparseDataset, r: int, seed) -> SparseDataset:
    """Keep at most ``r`` uniformly chosen active features per tuple."""
    if r < 1:
        raise ValueError("sampling rate r must be >= 1")
    rng = np.random.default_rng(seed)
    lengths = np.diff(d.indptr)
    row_ids = np.repeat(np.arange(len(d)), lengths)
    # a random key per entry; sorting by (row, key) gives a uniform permutation per row
    keys = rng.random(len(d.indices))
    order = np.lexsort((keys, row_ids))
    rank = np.arange(len(order)) - d.indptr[row_ids[order]]
    keep = np.sort(order[rank < r])
    kept_rows = row_ids[keep]
    new_lengths = np.bincount(kept_rows, minlength=len(d))
    indptr = np.concatenate(([0], np.cumsum(new_lengths)))
    return SparseDataset(d.labels, indptr, d.indices[keep], d.num_features,
                         min(r, d.max_ones_per_tuple))


@dataclass(frozen=True)
class FoldSplit:
    train_indices: list
    test_indices: list
    num_folds: int


def split_folds(n: int, k: int, seed) -> FoldSplit:
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > n:
        raise ValueError(f"cannot split {n} items into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    tests = [np.sort(part) for part in np.array_split(perm, k)]
    trains = [np.setdiff1d(np.arange(n), t) for t in tests]
    return FoldSplit([t.tolist() for t in trains], [t.tolist() for t in tests], k)


def generate_synthetic(num_tuples: int, num_features: int, num_predictive: int,
                       flip_prob: float, s: int, seed) -> SparseDataset:
    """Label-XOR-noise generator.

    Features ``0 .. num_predictive-1`` copy the label, each flipped
    independently with probability ``flip_prob``.  The remaining features
    fire independently with a small rate ``q``; every tuple is then truncated
    to at most ``s`` active features by uniform subsampling.
    """
    if num_predictive > num_features:
        raise ValueError("num_predictive exceeds num_features")
    if s > num_features:
        raise ValueError("s exceeds num_features")
    if not 0.0 <= flip_prob <= 1.0:
        raise ValueError("flip_prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=num_tuples)
    num_noise = num_features - num_predictive
    # a predictive feature fires with probability 1/2 under balanced labels
    expected_predictive = 0.5 * num_predictive
    q = 0.0
    if num_noise > 0:
        q = min(1.0, max(s - expected_predictive, 0.25 * s) / num_noise)
    pred = (labels[:, None] ^ (rng.random((num_tuples, num_predictive)) < flip_prob)).astype(bool)
    noise_counts = rng.binomial(num_noise, q, size=num_tuples) if num_noise else np.zeros(num_tuples, int)
    rows = []
    for i in range(num_tuples):
        active = np.flatnonzero(pred[i])
        if noise_counts[i]:
            active = np.concatenate((active, num_predictive + rng.choice(num_noise, noise_counts[i], replace=False)))
        if len(active) > s:
            active = rng.choice(active, s, replace=False)
        rows.append((int(labels[i]), active.tolist()))
    return SparseDataset.from_tuples(rows, num_features=num_features, max_ones_per_tuple=s)


def generate_predictions(n: int, n_pos: int, separation: float, seed, sharpness: float = 2.0):
    """Classifier-like scores: ``sigmoid(sharpness * z)``, ``z ~ N(+-separation/2, 1)``.

    Returns ``(labels, p)`` with exactly ``n_pos`` positives.
    """
    if not 0 < n_pos < n:
        raise ValueError("need at least one item of each class")
    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=np.int64)
    labels[:n_pos] = 1
    z = rng.standard_normal(n) + np.where(labels == 1, separation / 2, -separation / 2)
    p = 1.0 / (1.0 + np.exp(-sharpness * z))
    perm = rng.permutation(n)
    return labels[perm], p[perm]


def load_predictions(path):
    """Read a ``label,p`` CSV (header optional) into ``(labels, p)`` arrays."""
    labels, ps = [], []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [x.strip() for x in line.split(",")]
            if lineno == 1 and parts[0] == "label":
                continue
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'label,p'")
            label = _parse_int(parts[0], lineno, "label")
            try:
                p = float(parts[1])
            except ValueError:
                raise ParseError(lineno, f"invalid probability {parts[1]!r}") from None
            if label not in (0, 1) or not 0.0 <= p <= 1.0:
                raise ValidationError(f"line {lineno}: need label in {{0,1}} and p in [0,1]")
            labels.append(label)
            ps.append(p)
    return np.array(labels, dtype=np.int64), np.array(ps, dtype=np.float64)
