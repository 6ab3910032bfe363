"""Small independent reference implementations used as test oracles."""

import itertools
import math

import numpy as np

from privml.dataset import SparseDataset


def random_dataset(rng, n, m, s, p_active=0.3):
    rows = []
    for _ in range(n):
        active = np.flatnonzero(rng.random(m) < p_active)
        if len(active) > s:
            active = rng.choice(active, s, replace=False)
        rows.append((int(rng.integers(0, 2)), sorted(active.tolist())))
    return SparseDataset.from_tuples(rows, num_features=m, max_ones_per_tuple=s)


def dense_counts(d):
    """(n11, n10, n01, n00) by explicit loops over a dense matrix."""
    x = d.to_dense()
    m = d.num_features
    out = np.zeros((4, m), dtype=np.int64)
    for i in range(len(d)):
        for f in range(m):
            lab, on = int(d.labels[i]), int(x[i, f])
            out[(1 - on) * 2 + (1 - lab), f] += 1
    return out


def ig_oracle(n11, n10, n01, n00):
    """Information gain in nats written directly from the entropy definitions."""
    n = n11 + n10 + n01 + n00

    def h(*cs):
        tot = sum(cs)
        return -sum(c / tot * math.log(c / tot) for c in cs if c > 0) if tot else 0.0

    cond = 0.0
    if n11 + n10:
        cond += (n11 + n10) / n * h(n11, n10)
    if n01 + n00:
        cond += (n01 + n00) / n * h(n01, n00)
    return max(0.0, h(n11 + n01, n10 + n00) - cond)


def isotonic_bruteforce(y):
    """Best non-decreasing fit by enumerating every split into contiguous blocks."""
    y = list(map(float, y))
    n = len(y)
    best, best_fit = math.inf, None
    for cuts in itertools.product([0, 1], repeat=n - 1):
        blocks, start = [], 0
        for i, c in enumerate(cuts, start=1):
            if c:
                blocks.append((start, i))
                start = i
        blocks.append((start, n))
        means = [sum(y[a:b]) / (b - a) for a, b in blocks]
        if any(means[i] > means[i + 1] + 1e-15 for i in range(len(means) - 1)):
            continue
        fit = [mu for (a, b), mu in zip(blocks, means) for _ in range(a, b)]
        sse = sum((u - v) ** 2 for u, v in zip(y, fit))
        if sse < best:
            best, best_fit = sse, fit
    return np.array(best_fit)


def smooth_sensitivity_bruteforce(x, beta, lo, hi):
    """max over every k of exp(-k beta) * max_t (x[m+t] - x[m+t-k-1]), clamped indices."""
    x = list(map(float, x))
    n = len(x)
    if n == 0:
        return hi - lo
    m = (n - 1) // 2

    def at(i):
        if i < 0:
            return lo
        if i >= n:
            return hi
        return x[i]

    best = 0.0
    for k in range(0, n + 2):
        width = max(at(m + t) - at(m + t - k - 1) for t in range(0, k + 2))
        best = max(best, math.exp(-k * beta) * width)
    return best


def mann_whitney_auc(labels, p):
    pos = [v for l, v in zip(labels, p) if l == 1]
    neg = [v for l, v in zip(labels, p) if l == 0]
    wins = 0.0
    for a in pos:
        for b in neg:
            wins += 1.0 if a > b else (0.5 if a == b else 0.0)
    return wins / (len(pos) * len(neg))
