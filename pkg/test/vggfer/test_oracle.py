# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import numpy as np
import pytest

from vggfer.exceptions import OddExtentError, OracleScopeError, ShapeMismatchError
from vggfer.oracle import (
    oracle_conv2d, oracle_maxpool2d, oracle_dense, oracle_pca, oracle_relu, oracle_resize_bilinear,
    oracle_svm_dual)
from vggfer.oracle.crosscheck import CHECKS, run_crosschecks
from vggfer.oracle.pca import MAX_ORACLE_DIM
from vggfer.oracle.svm import MAX_ORACLE_SAMPLES


@pytest.mark.parametrize('seed', [0, 1, 2])
def test_crosschecks_pass(seed):
    results = run_crosschecks(seed)
    assert [r.name for r in results] == ['conv2d', 'maxpool2d', 'dense', 'resize', 'pca', 'svm']
    assert len(results) == len(CHECKS)
    failed = [r for r in results if not r.passed]
    assert not failed, failed


def test_resize_identity():
    pixels = np.arange(12, dtype=np.float64).reshape(3, 4)
    assert np.array_equal(oracle_resize_bilinear(pixels, 3, 4), pixels)


def test_resize_upsample_corners():
    out = oracle_resize_bilinear(np.array([[0.0, 1.0], [2.0, 3.0]]), 4, 4)
    assert out[0, 0] == 0.0
    assert out[-1, -1] == 3.0
    assert out[1, 1] == pytest.approx(0.75)


def test_relu():
    assert np.array_equal(oracle_relu([-1.0, 0.0, 2.5]), [0.0, 0.0, 2.5])


def test_kernel_shape_errors():
    with pytest.raises(ShapeMismatchError):
        oracle_conv2d(np.zeros((2, 4, 4)), np.zeros((1, 3, 3, 3)), np.zeros(1))
    with pytest.raises(ShapeMismatchError):
        oracle_dense(np.zeros(3), np.zeros((2, 4)), np.zeros(2))
    with pytest.raises(OddExtentError):
        oracle_maxpool2d(np.zeros((1, 3, 4)))


def test_pca_scope():
    with pytest.raises(OracleScopeError):
        oracle_pca(np.zeros((3, MAX_ORACLE_DIM + 1)), 1)


def test_svm_scope():
    n = MAX_ORACLE_SAMPLES + 1
    with pytest.raises(OracleScopeError):
        oracle_svm_dual(np.zeros((n, 2)), np.ones(n), 1.0)


def test_svm_dual_respects_box():
    rng = np.random.default_rng(0)
    X = np.hstack([rng.standard_normal((20, 2)), np.ones((20, 1))])
    y = np.where(X[:, 0] > 0, 1.0, -1.0)
    result = oracle_svm_dual(X, y, C=0.5)
    assert np.all(result.alpha >= 0.0) and np.all(result.alpha <= 0.5)
    assert np.allclose(result.weights, (result.alpha * y) @ X)
