import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import mann_whitney_auc, smooth_sensitivity_bruteforce
from privml.classifier import PredictionSet
from privml.dataset import generate_predictions
from privml.dp import PrivacyBudget
from privml.roc import (RocCurve, ThresholdMethod, ThresholdSet, bucket_counts,
                        choose_fixed_space, choose_recursive_medians, curve_l1_distance,
                        discretization_bias, empirical_quantile_thresholds, exact_roc,
                        laplace_roc_baseline, priroc, roc_at_thresholds,
                        smooth_sensitivity_median, theorem5_bounds, trapezoid_area)


def preds(labels, p):
    return PredictionSet(np.asarray(labels), np.asarray(p, dtype=np.float64))


def synthetic(n=200, n_pos=120, sep=2.0, seed=0):
    return preds(*generate_predictions(n, n_pos, sep, seed))


@given(st.lists(st.tuples(st.integers(0, 1), st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.9, 1.0])),
                min_size=2, max_size=30))
def test_auc_matches_mann_whitney(items):
    labels, p = zip(*items)
    if len(set(labels)) < 2:
        return
    ps = preds(labels, p)
    assert exact_roc(ps).auc == pytest.approx(mann_whitney_auc(labels, p), abs=1e-12)


def test_exact_roc_small_example():
    c = exact_roc(preds([1, 0, 1, 0], [0.9, 0.8, 0.7, 0.1]))
    # thresholds 1, .9, .8, .7, .1, 0 with p > theta counted as positive
    np.testing.assert_allclose(c.tpr, [0, 0, 0.5, 0.5, 1, 1])
    np.testing.assert_allclose(c.fpr, [0, 0, 0, 0.5, 0.5, 1])
    assert c.auc == pytest.approx(0.75)


def test_threshold_set_validation():
    with pytest.raises(ValueError):
        ThresholdSet(np.array([1.0, 0.5, 0.5, 0.0]), "custom")
    t = ThresholdSet.from_values([0.3, 1.2, 0.3, -1, 0.6], "custom")
    np.testing.assert_array_equal(t.thetas, [1, 0.6, 0.3, 0])


def test_fixed_space_grid():
    t = choose_fixed_space(4, 1.0)
    np.testing.assert_allclose(t.thetas, [1, 0.75, 0.5, 0.25, 0])
    assert t.method is ThresholdMethod.FIXED_SPACE
    assert choose_fixed_space(10, 0.2).num_buckets == 2


def test_bucket_counts_sum_to_classes():
    p = synthetic()
    x_tp, x_fp = bucket_counts(p, choose_fixed_space(len(p), 0.1))
    assert x_tp.sum() == p.n_pos and x_fp.sum() == p.n_neg


def test_smooth_sensitivity_oracle_grid():
    rng = np.random.default_rng(0)
    grid = np.linspace(0, 1, 9)
    for _ in range(300):
        x = np.sort(rng.choice(grid, int(rng.integers(0, 12))))
        beta = float(rng.choice([0.01, 0.1, 0.5, 2.0]))
        assert smooth_sensitivity_median(x, beta) == pytest.approx(
            smooth_sensitivity_bruteforce(x, beta, 0.0, 1.0), abs=1e-12)
    with pytest.raises(ValueError):
        smooth_sensitivity_median(np.array([0.5, 0.2]), 0.1)


def test_recursive_medians_noiseless():
    p = preds([1, 0, 1, 0, 1, 0, 1], [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])
    t = choose_recursive_medians(p, math.inf, 2, None)
    np.testing.assert_allclose(t.thetas, [1, 0.6, 0.4, 0.2, 0])


def test_recursive_medians_budget_and_count():
    p = synthetic()
    b = PrivacyBudget(1.0)
    t = choose_recursive_medians(p, 0.2, 3, np.random.default_rng(0), b)
    assert b.ledger == [("roc/recursive-medians", 0.2)]
    assert len(t) - 2 <= 7


def test_priroc_spends_exactly_eps():
    p = synthetic()
    for chooser, arg in (("fixed-space", 0.5), ("recursive-medians", 4)):
        b = PrivacyBudget(1.0)
        c = priroc(p, 1.0, 0.2, chooser, arg, np.random.default_rng(0), b)
        assert b.spent == pytest.approx(1.0)
        assert c.fpr[0] == c.tpr[0] == 0 and c.fpr[-1] == c.tpr[-1] == 1
        assert np.all(np.diff(c.tpr) >= 0) and np.all(np.diff(c.fpr) >= 0)


def test_priroc_noiseless_equals_exact_at_thresholds():
    p = synthetic()
    th = choose_fixed_space(len(p), 0.3)
    a = priroc(p, math.inf, 0.2, "fixed-space", 0.3, None)
    b = roc_at_thresholds(p, th)
    np.testing.assert_array_equal(a.tpr, b.tpr)
    np.testing.assert_array_equal(a.fpr, b.fpr)


def test_priroc_rejects_bad_input():
    with pytest.raises(ValueError):
        priroc(synthetic(), 1.0, 0.0, "recursive-medians", 3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        priroc(preds([1, 1], [0.1, 0.2]), 1.0, 0.2, "fixed-space", 1.0, np.random.default_rng(0))


def test_laplace_baseline_noise_scale():
    p = synthetic()
    th = empirical_quantile_thresholds(p, 4)
    assert th.num_buckets == 5
    b = PrivacyBudget(1.0)
    laplace_roc_baseline(p, th, 1.0, np.random.default_rng(0), b)
    assert b.spent == 1.0
    exact = laplace_roc_baseline(p, th, math.inf, None)
    ref = roc_at_thresholds(p, th)
    np.testing.assert_array_equal(exact.tpr, ref.tpr)


def test_bounds_examples():
    p = synthetic(2000, 1000)
    th = choose_fixed_space(len(p), 0.05)
    c = roc_at_thresholds(p, th)
    r = theorem5_bounds(c, p.n_pos, p.n_neg, th.num_buckets, 0.5, 0.95)
    # scale = (1 + log2 128) / 0.5 = 16; tail = 16 ln 20
    assert r.X == pytest.approx(2 * 16 * math.log(20) / 1000)
    assert r.lower_area <= c.auc <= r.upper_area
    wide = theorem5_bounds(c, 5, 5, th.num_buckets, 0.5, 0.95)
    assert (wide.upper_area, wide.lower_area) == (1.0, 0.0)
    tight = theorem5_bounds(c, p.n_pos, p.n_neg, th.num_buckets, math.inf, 0.95)
    assert tight.upper_area == pytest.approx(c.auc) and tight.lower_area == pytest.approx(c.auc)
    with pytest.raises(ValueError):
        theorem5_bounds(c, 0, 5, 3, 1.0, 0.9)


def test_discretization_bias_zero_on_all_predictions():
    p = synthetic()
    assert discretization_bias(p, exact_roc(p).thresholds) == 0.0
    assert discretization_bias(p, choose_fixed_space(len(p), 0.02)) > 0.0


def _l1_oracle(a, b, grid=200_001):
    # dense midpoint sampling of |tpr_a - tpr_b| with step curves treated as vertical segments
    x = (np.arange(grid) + 0.5) / grid

    def f(c):
        return np.interp(x, c.fpr, c.tpr)

    return float(np.mean(np.abs(f(a) - f(b))))


def test_curve_l1_against_sampling():
    rng = np.random.default_rng(3)
    th = ThresholdSet.from_values([0.5], "custom")
    for _ in range(20):
        def rand_curve():
            f = np.concatenate(([0], np.sort(rng.random(4)), [1]))
            t = np.concatenate(([0], np.sort(rng.random(4)), [1]))
            return RocCurve(f, t, trapezoid_area(f, t), th)

        a, b = rand_curve(), rand_curve()
        assert curve_l1_distance(a, b) == pytest.approx(_l1_oracle(a, b), abs=2e-5)
        assert curve_l1_distance(a, a) == 0.0


def test_curve_l1_vertical_segments():
    th = ThresholdSet.from_values([0.5], "custom")
    step = RocCurve(np.array([0, 0, 1.0]), np.array([0, 1, 1.0]), 1.0, th)
    diag = RocCurve(np.array([0, 0.5, 1.0]), np.array([0, 0.5, 1.0]), 0.5, th)
    assert curve_l1_distance(step, diag) == pytest.approx(0.5)
