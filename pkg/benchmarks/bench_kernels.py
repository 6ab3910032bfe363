"""Time each hot kernel on the numba and pure-numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The numba timings exclude compilation (one warm-up call per kernel).
"""

import argparse
import timeit

import numpy as np

from privml._kernels import _numpy as npk
from privml.dataset import generate_synthetic

try:
    from privml._kernels import _numba as nbk
except ImportError:  # pragma: no cover
    nbk = None


def cases():
    rng = np.random.default_rng(0)
    d = generate_synthetic(2000, 5000, 50, 0.2, 20, 0)
    w = rng.standard_normal(d.num_features)
    noisy = np.sort(rng.random(4096)) + 0.05 * rng.standard_normal(4096)
    preds = np.sort(rng.random(558))
    pts = rng.integers(0, 2000, size=(5000, 2)).astype(np.float64)
    centers = rng.random((5, 2)) * 2000
    return {
        "label_feature_counts": lambda k: k.label_feature_counts(d.indptr, d.indices, d.labels,
                                                                 d.num_features),
        "row_weight_sums": lambda k: k.row_weight_sums(d.indptr, d.indices, w),
        "pav": lambda k: k.pav(noisy),
        "smooth_sensitivity_median": lambda k: k.smooth_sensitivity_median(preds, 0.001, 0.0, 1.0),
        "nearest_center": lambda k: k.nearest_center(pts, centers),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_np = min(timeit.repeat(lambda: fn(npk), number=1, repeat=args.repeat)) * 1e3
        if nbk is None:
            print(f"{name:28s} {t_np:10.3f} {'-':>10s} {'-':>8s}")
            continue
        fn(nbk)
        t_nb = min(timeit.repeat(lambda: fn(nbk), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {t_np:10.3f} {t_nb:10.3f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
