"""Empirical differential-privacy check by output histogram ratios.

Run a mechanism ``N`` times on each of two neighboring inputs, bin the
outputs, and compare bin frequencies.  With add-one smoothing the statistic
is ``max over bins of (count_a + 1) / (count_b + 1)`` taken in both
directions; for an epsilon-DP mechanism it should not exceed
``exp(epsilon) * (1 + slack)`` beyond sampling error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

import numpy as np


@dataclass(frozen=True)
class RatioReport:
    max_ratio: float
    bound: float
    worst_bin: Hashable
    num_bins: int

    @property
    def passed(self) -> bool:
        return self.max_ratio <= self.bound


def histogram(outputs: Iterable[Hashable]) -> dict:
    counts: dict = {}
    for o in outputs:
        counts[o] = counts.get(o, 0) + 1
    return counts


def privacy_ratio(counts_a: dict, counts_b: dict, epsilon: float, slack: float = 0.15,
                  min_count: int = 0) -> RatioReport:
    """Symmetric smoothed ratio statistic over the union of observed bins.

    Bins where both counts fall below ``min_count`` are ignored; they carry
    too little mass to resolve a ratio of ``exp(epsilon)``.
    """
    worst, worst_bin = 0.0, None
    bins = set(counts_a) | set(counts_b)
    for b in bins:
        a, c = counts_a.get(b, 0), counts_b.get(b, 0)
        if max(a, c) < min_count:
            continue
        r = max((a + 1) / (c + 1), (c + 1) / (a + 1))
        if r > worst:
            worst, worst_bin = r, b
    return RatioReport(worst, float(np.exp(epsilon) * (1 + slack)), worst_bin, len(bins))


def check_mechanism(mechanism: Callable, input_a, input_b, epsilon: float, trials: int,
                    binner: Callable = lambda o: o, rng_a=None, rng_b=None, slack: float = 0.15,
                    min_count: int = 0) -> RatioReport:
    """Run ``mechanism(input, rng)`` ``trials`` times per input and compare histograms."""
    rng_a = rng_a if rng_a is not None else np.random.default_rng(0)
    rng_b = rng_b if rng_b is not None else np.random.default_rng(1)
    ca = histogram(binner(mechanism(input_a, rng_a)) for _ in range(trials))
    cb = histogram(binner(mechanism(input_b, rng_b)) for _ in range(trials))
    return privacy_ratio(ca, cb, epsilon, slack, min_count)
