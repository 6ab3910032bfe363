"""Pure-numpy reference kernels.

Every function here has a twin in ``_numba`` with an identical signature and
identical results (up to floating-point rounding in ``exp``).
"""

import numpy as np


def label_feature_counts(indptr, indices, labels, num_features):
    """Return ``(n11, n10)``: per-feature counts of active entries by label."""
    row_len = np.diff(indptr)
    entry_labels = np.repeat(labels, row_len)
    n11 = np.bincount(indices[entry_labels == 1], minlength=num_features)
    n10 = np.bincount(indices[entry_labels == 0], minlength=num_features)
    return n11.astype(np.int64), n10.astype(np.int64)


def row_weight_sums(indptr, indices, weights):
    """Sum ``weights[f]`` over the active features ``f`` of every row."""
    n = len(indptr) - 1
    row_ids = np.repeat(np.arange(n), np.diff(indptr))
    return np.bincount(row_ids, weights=weights[indices], minlength=n).astype(np.float64)


def pav(y):
    """Unit-weight pool-adjacent-violators: L2-closest non-decreasing vector."""
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    sums = []
    counts = []
    for v in y:
        sums.append(v)
        counts.append(1)
        # merge while the previous block mean exceeds the last one
        while len(sums) > 1 and sums[-2] * counts[-1] > sums[-1] * counts[-2]:
            s = sums.pop()
            c = counts.pop()
            sums[-1] += s
            counts[-1] += c
    out = np.empty(n, dtype=np.float64)
    pos = 0
    for s, c in zip(sums, counts):
        out[pos:pos + c] = s / c
        pos += c
    return out


def smooth_sensitivity_median(x, beta, lo, hi):
    """Beta-smooth sensitivity of the (lower) median of sorted ``x`` in [lo, hi]."""
    x = np.asarray(x, dtype=np.float64)
    n = len(x)
    if n == 0:
        return float(hi - lo)
    m = (n - 1) // 2
    padded = np.concatenate(([lo], x, [hi]))
    best = 0.0
    for k in range(n + 2):
        t = np.arange(k + 2)
        upper = np.clip(m + t, -1, n) + 1
        lower = np.clip(m + t - k - 1, -1, n) + 1
        width = np.max(padded[upper] - padded[lower])
        best = max(best, np.exp(-k * beta) * width)
        if width >= hi - lo:
            # every larger k only shrinks the weight of an already maximal width
            break
    return float(best)


def nearest_center(points, centers):
    """Index of the Euclidean-nearest center per point; ties go to the lowest id."""
    d = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d, axis=1).astype(np.int64)
