"""Noise samplers and privacy-budget accounting.

Mechanisms never draw privacy noise directly from a budget number: they first
obtain a :class:`Receipt` from :meth:`PrivacyBudget.spend` (or
:meth:`PrivacyBudget.spend_parallel`) and draw noise through it.  That keeps
the ledger the single source of truth for what was spent.

``epsilon = math.inf`` is the noiseless mode: receipts with infinite epsilon
produce exactly zero noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

# relative slack for float round-off when comparing spent against the total
_BUDGET_RTOL = 1e-9


class BudgetExhausted(RuntimeError):
    def __init__(self, label: str, requested: float, remaining: float):
        super().__init__(f"privacy budget exhausted at stage {label!r}: "
                         f"requested {requested:g}, remaining {remaining:g}")
        self.label = label


def make_rng(seed, *stream: int) -> np.random.Generator:
    """PCG64 stream for ``(seed, *stream)``; distinct streams are independent."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(stream))))


def sample_laplace(scale: float, rng: np.random.Generator, size=None):
    """Inverse-CDF Laplace draw(s) with density proportional to exp(-|z|/scale)."""
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    u = rng.random(size)
    v = np.maximum(u, np.finfo(float).tiny) - 0.5
    z = -scale * np.sign(v) * np.log1p(-2.0 * np.abs(v))
    return float(z) if size is None else z


def sample_cauchy_like(rng: np.random.Generator, size=None):
    """Draw from the density proportional to 1/(1+z^2) as tan(pi*(U-0.5))."""
    u = rng.random(size)
    z = np.tan(np.pi * (u - 0.5))
    return float(z) if size is None else z


def laplace_tail_quantile(scale: float, delta: float) -> float:
    """``t`` with P(|Z| <= t) = delta for Z ~ Laplace(scale)."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    return scale * math.log(1.0 / (1.0 - delta))


@dataclass(frozen=True)
class Receipt:
    """Proof that ``epsilon`` was charged to a budget under ``label``."""

    label: str
    epsilon: float

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.epsilon)

    def laplace(self, sensitivity: float, rng: np.random.Generator, size=None):
        """Laplace(sensitivity / epsilon) noise, or zeros in noiseless mode."""
        if self.noiseless:
            return 0.0 if size is None else np.zeros(size)
        return sample_laplace(sensitivity / self.epsilon, rng, size)

    def split(self, *fractions: float) -> List["Receipt"]:
        """Sequentially compose this receipt into parts; fractions must sum to 1."""
        if any(f <= 0 for f in fractions) or not math.isclose(sum(fractions), 1.0, rel_tol=1e-12):
            raise ValueError("fractions must be positive and sum to 1")
        return [Receipt(f"{self.label}[{i}]", self.epsilon * f) for i, f in enumerate(fractions)]


@dataclass
class PrivacyBudget:
    total_epsilon: float
    spent: float = 0.0
    ledger: List[Tuple[str, float]] = field(default_factory=list)

    def __post_init__(self):
        if not self.total_epsilon > 0:
            raise ValueError("total epsilon must be positive")

    @property
    def remaining(self) -> float:
        return self.total_epsilon - self.spent

    def _charge(self, label: str, amount: float) -> None:
        limit = self.total_epsilon * (1 + _BUDGET_RTOL)
        if self.spent + amount > limit:
            raise BudgetExhausted(label, amount, self.remaining)
        self.spent += amount
        self.ledger.append((label, amount))

    def spend(self, label: str, epsilon: float) -> Receipt:
        """Sequential composition: charge ``epsilon``."""
        if not epsilon > 0:
            raise ValueError("epsilon must be positive")
        self._charge(label, epsilon)
        return Receipt(label, epsilon)

    def spend_parallel(self, label: str, epsilons: Sequence[float]) -> List[Receipt]:
        """Parallel composition over disjoint partitions: charge ``max(epsilons)``.

        The caller is responsible for the disjointness of the partitions.
        """
        if not epsilons:
            raise ValueError("parallel spend needs at least one epsilon")
        if any(not e > 0 for e in epsilons):
            raise ValueError("epsilon must be positive")
        self._charge(label, max(epsilons))
        return [Receipt(f"{label}[{i}]", e) for i, e in enumerate(epsilons)]

    def replay(self) -> float:
        return float(sum(e for _, e in self.ledger))


def charge(budget: Optional[PrivacyBudget], label: str, epsilon: float) -> Receipt:
    """Spend on ``budget``, or on a fresh single-use budget when none is given."""
    if budget is None:
        budget = PrivacyBudget(epsilon)
    return budget.spend(label, epsilon)
