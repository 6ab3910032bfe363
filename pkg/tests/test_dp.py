import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from privml.dp import (BudgetExhausted, PrivacyBudget, Receipt, charge, laplace_tail_quantile,
                       make_rng, sample_cauchy_like, sample_laplace)


def test_laplace_moments():
    z = sample_laplace(2.0, np.random.default_rng(0), 200_000)
    assert abs(z.mean()) < 0.03
    assert np.var(z) == pytest.approx(2 * 2.0 ** 2, rel=0.03)
    # P(|Z| > t) = exp(-t / b)
    assert np.mean(np.abs(z) > 4.0) == pytest.approx(math.exp(-2.0), rel=0.03)


def test_laplace_rejects_bad_scale():
    with pytest.raises(ValueError):
        sample_laplace(0.0, np.random.default_rng(0))


def test_cauchy_like_quartiles():
    z = sample_cauchy_like(np.random.default_rng(1), 200_000)
    np.testing.assert_allclose(np.quantile(z, [0.25, 0.5, 0.75]), [-1, 0, 1], atol=0.02)


@given(st.floats(0.01, 100), st.floats(0.01, 0.99))
def test_tail_quantile_inverts_cdf(scale, delta):
    t = laplace_tail_quantile(scale, delta)
    assert 1 - math.exp(-t / scale) == pytest.approx(delta, rel=1e-9)


def test_make_rng_streams_are_deterministic_and_distinct():
    a = make_rng(7, 1, 2).random(5)
    np.testing.assert_array_equal(a, make_rng(7, 1, 2).random(5))
    assert not np.array_equal(a, make_rng(7, 1, 3).random(5))
    assert not np.array_equal(a, make_rng(8, 1, 2).random(5))


def test_budget_sequential_and_exhaustion():
    b = PrivacyBudget(1.0)
    b.spend("a", 0.3)
    b.spend("b", 0.7)
    assert b.spent == pytest.approx(1.0) and b.replay() == pytest.approx(1.0)
    with pytest.raises(BudgetExhausted) as exc:
        b.spend("c", 1e-3)
    assert exc.value.label == "c"
    assert [lab for lab, _ in b.ledger] == ["a", "b"]


def test_budget_roundoff_tolerated():
    b = PrivacyBudget(1.0)
    for _ in range(10):
        b.spend("tenth", 0.1)
    assert b.spent == pytest.approx(1.0)


def test_parallel_charges_max():
    b = PrivacyBudget(1.0)
    rs = b.spend_parallel("folds", [0.2, 0.5, 0.4])
    assert b.spent == pytest.approx(0.5)
    assert [r.epsilon for r in rs] == [0.2, 0.5, 0.4]


def test_receipt_split_and_noiseless():
    r = Receipt("x", 1.0)
    parts = r.split(0.25, 0.75)
    assert [p.epsilon for p in parts] == [0.25, 0.75]
    with pytest.raises(ValueError):
        r.split(0.5, 0.6)
    inf = charge(None, "inf", math.inf)
    assert inf.noiseless
    assert inf.laplace(5.0, np.random.default_rng(0)) == 0.0
    assert not inf.laplace(5.0, np.random.default_rng(0), 4).any()


def test_receipt_laplace_scale():
    z = Receipt("x", 0.5).laplace(3.0, np.random.default_rng(2), 100_000)
    assert np.mean(np.abs(z)) == pytest.approx(6.0, rel=0.02)
