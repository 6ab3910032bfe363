import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from privml._kernels import _numpy as npk

nbk = pytest.importorskip("privml._kernels._numba")

from helpers import random_dataset, smooth_sensitivity_bruteforce  # noqa: E402


def test_label_feature_counts_backends_agree():
    rng = np.random.default_rng(3)
    for _ in range(10):
        d = random_dataset(rng, int(rng.integers(1, 60)), int(rng.integers(1, 30)), 5)
        a = npk.label_feature_counts(d.indptr, d.indices, d.labels, d.num_features)
        b = nbk.label_feature_counts(d.indptr, d.indices, d.labels, d.num_features)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x, y)


def test_row_weight_sums_backends_agree():
    rng = np.random.default_rng(4)
    d = random_dataset(rng, 40, 25, 6)
    w = rng.standard_normal(25)
    np.testing.assert_allclose(npk.row_weight_sums(d.indptr, d.indices, w),
                               nbk.row_weight_sums(d.indptr, d.indices, w), rtol=0, atol=1e-12)


@given(st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=40))
def test_pav_backends_agree(y):
    y = np.array(y)
    np.testing.assert_allclose(npk.pav(y), nbk.pav(y), atol=1e-12)


@given(st.lists(st.floats(0, 1, allow_nan=False), max_size=30), st.floats(0.001, 2.0))
def test_smooth_sensitivity_backends_agree_with_bruteforce(xs, beta):
    x = np.sort(np.array(xs, dtype=np.float64))
    ref = smooth_sensitivity_bruteforce(x, beta, 0.0, 1.0)
    assert npk.smooth_sensitivity_median(x, beta, 0.0, 1.0) == pytest.approx(ref, abs=1e-12)
    assert nbk.smooth_sensitivity_median(x, beta, 0.0, 1.0) == pytest.approx(ref, abs=1e-12)


def test_nearest_center_backends_agree_and_break_ties_low():
    rng = np.random.default_rng(5)
    pts = rng.integers(0, 5, size=(200, 2)).astype(float)
    centers = np.array([[1.0, 1.0], [1.0, 1.0], [3.0, 3.0]])
    a = npk.nearest_center(pts, centers)
    np.testing.assert_array_equal(a, nbk.nearest_center(pts, centers))
    assert not np.any(a == 1)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, PRIVML_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "from privml import _kernels; print(_kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
