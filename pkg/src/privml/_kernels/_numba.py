"""numba-compiled kernels; same contracts as ``_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True)
def label_feature_counts(indptr, indices, labels, num_features):
    n11 = np.zeros(num_features, dtype=np.int64)
    n10 = np.zeros(num_features, dtype=np.int64)
    for row in range(len(indptr) - 1):
        target = n11 if labels[row] == 1 else n10
        for j in range(indptr[row], indptr[row + 1]):
            target[indices[j]] += 1
    return n11, n10


@njit(cache=True)
def row_weight_sums(indptr, indices, weights):
    n = len(indptr) - 1
    out = np.zeros(n, dtype=np.float64)
    for row in range(n):
        acc = 0.0
        for j in range(indptr[row], indptr[row + 1]):
            acc += weights[indices[j]]
        out[row] = acc
    return out


@njit(cache=True)
def _pav(y):
    n = len(y)
    sums = np.empty(n, dtype=np.float64)
    counts = np.empty(n, dtype=np.int64)
    top = -1
    for i in range(n):
        top += 1
        sums[top] = y[i]
        counts[top] = 1
        while top > 0 and sums[top - 1] * counts[top] > sums[top] * counts[top - 1]:
            sums[top - 1] += sums[top]
            counts[top - 1] += counts[top]
            top -= 1
    out = np.empty(n, dtype=np.float64)
    pos = 0
    for b in range(top + 1):
        v = sums[b] / counts[b]
        for _ in range(counts[b]):
            out[pos] = v
            pos += 1
    return out


def pav(y):
    return _pav(np.ascontiguousarray(y, dtype=np.float64))


@njit(cache=True)
def _smooth_sensitivity_median(x, beta, lo, hi):
    n = len(x)
    if n == 0:
        return hi - lo
    m = (n - 1) // 2
    best = 0.0
    for k in range(n + 2):
        width = 0.0
        for t in range(k + 2):
            a = m + t
            b = m + t - k - 1
            va = lo if a < 0 else (hi if a >= n else x[a])
            vb = lo if b < 0 else (hi if b >= n else x[b])
            if va - vb > width:
                width = va - vb
        cand = np.exp(-k * beta) * width
        if cand > best:
            best = cand
        if width >= hi - lo:
            break
    return best


def smooth_sensitivity_median(x, beta, lo, hi):
    return float(_smooth_sensitivity_median(
        np.ascontiguousarray(x, dtype=np.float64), float(beta), float(lo), float(hi)))


@njit(cache=True)
def nearest_center(points, centers):
    n = points.shape[0]
    k = centers.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = np.inf
        arg = 0
        for c in range(k):
            d = 0.0
            for j in range(points.shape[1]):
                diff = points[i, j] - centers[c, j]
                d += diff * diff
            if d < best:
                best = d
                arg = c
        out[i] = arg
    return out
