import math

import numpy as np
import pytest

from privml.classifier import (NaiveBayesModel, PredictionSet, evaluate_accuracy,
                               majority_accuracy, nb_predict, nb_train, predict_proba, predictions)
from privml.dataset import SparseDataset, Tuple, generate_synthetic
from privml.dp import PrivacyBudget


def toy():
    return SparseDataset.from_tuples(
        [(1, [0]), (1, [0, 1]), (1, [0]), (0, [1]), (0, [1, 2]), (0, [])], num_features=3)


def test_exact_counts_and_posterior_by_hand():
    m = nb_train(toy(), math.inf, None)
    np.testing.assert_array_equal(m.label_counts, [3, 3])
    np.testing.assert_array_equal(m.joint_counts, [[0, 3], [2, 1], [1, 0]])
    # x = {0}: P(F0=1|1)=4/5, P(F1=0|1)=3/5, P(F2=0|1)=4/5; label 0: 1/5, 2/5, 3/5
    lik1 = 0.8 * 0.6 * 0.8
    lik0 = 0.2 * 0.4 * 0.6
    assert nb_predict(m, Tuple(1, (0,))) == pytest.approx(lik1 / (lik1 + lik0))


def test_mask_restricts_model():
    d = toy()
    mask = np.array([True, False, False])
    m = nb_train(d, math.inf, None, feature_mask=mask)
    assert m.joint_counts[1:].sum() == 0
    p = predict_proba(m, d)
    np.testing.assert_allclose(p[[0, 1, 2]], 0.8)
    np.testing.assert_allclose(p[[3, 4, 5]], 0.2)
    with pytest.raises(ValueError):
        predict_proba(m, d, np.array([True, True, False]))


def test_private_training_budget_and_clamp():
    d = generate_synthetic(200, 50, 5, 0.2, 6, 0)
    b = PrivacyBudget(0.5)
    m = nb_train(d, 0.5, np.random.default_rng(0), b)
    assert b.spent == pytest.approx(0.5)
    assert np.all(m.joint_counts >= 0) and np.all(m.label_counts >= 0)


def test_private_training_noise_scale():
    # s' = 2 features, so labels and joints both get Laplace(3 / eps)
    d = SparseDataset.from_tuples([(1, [0, 1])] * 500, num_features=2)
    noise = []
    for seed in range(3000):
        m = nb_train(d, 1.0, np.random.default_rng(seed))
        noise.append(m.joint_counts[0, 1] - 500)
    assert np.mean(np.abs(noise)) == pytest.approx(3.0, rel=0.05)


def test_accuracy_improves_with_signal():
    d = generate_synthetic(600, 200, 20, 0.1, 20, 1)
    train, test = d.subset(range(400)), d.subset(range(400, 600))
    m = nb_train(train, math.inf, None)
    assert evaluate_accuracy(m, test) > 0.9
    assert majority_accuracy(test.labels) < 0.6
    with pytest.raises(ValueError):
        evaluate_accuracy(m, d.subset([]))


def test_json_roundtrip(tmp_path):
    d = toy()
    m = nb_train(d, 1.0, np.random.default_rng(0), feature_mask=np.array([True, False, True]))
    path = tmp_path / "m.json"
    m.save(path)
    back = NaiveBayesModel.load(path)
    np.testing.assert_array_equal(back.joint_counts, m.joint_counts)
    np.testing.assert_array_equal(back.trained, m.trained)
    np.testing.assert_array_equal(predict_proba(back, d), predict_proba(m, d))
    with pytest.raises(ValueError):
        NaiveBayesModel.from_json('{"format": "other"}')


def test_prediction_set_validation():
    ps = predictions(nb_train(toy(), math.inf, None), toy())
    assert ps.n_pos == 3 and ps.n_neg == 3 and len(ps) == 6
    with pytest.raises(ValueError):
        PredictionSet(np.array([0, 2]), np.array([0.1, 0.2]))
    with pytest.raises(ValueError):
        PredictionSet(np.array([0, 1]), np.array([0.1, 1.2]))


def test_perfect_feature_with_light_smoothing():
    m = NaiveBayesModel(np.array([100.0, 100.0]), np.array([[0.0, 100.0]]), np.array([True]), 0.01)
    assert nb_predict(m, Tuple(1, (0,))) > 0.99


def test_no_signal_gives_majority_accuracy():
    d = generate_synthetic(2000, 200, 0, 0.0, 10, 4)
    train, test = d.subset(range(1500)), d.subset(range(1500, 2000))
    acc = evaluate_accuracy(nb_train(train, math.inf, None), test)
    assert abs(acc - majority_accuracy(test.labels)) < 0.06
