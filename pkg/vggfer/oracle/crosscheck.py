# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Seeded small-instance comparisons of the library against the oracles."""

from typing import Callable, List, NamedTuple

import numpy as np
import torch

from vggfer.core.pca import pca_fit, pca_transform
from vggfer.core.svm import append_bias, primal_objective, svm_predict, svm_train_binary, svm_train_ovr
from vggfer.data.preprocess import resize_intensities
from vggfer.function import ops
from .kernels import oracle_conv2d, oracle_dense, oracle_maxpool2d
from .pca import oracle_pca
from .resize import oracle_resize_bilinear
from .svm import oracle_predict, oracle_svm_dual

__all__ = ['CheckResult', 'run_crosschecks', 'CHECKS']

KERNEL_RTOL = 1e-5
PCA_TOL = 1e-6
RESIZE_TOL = 1e-6
SVM_RTOL = 1e-3


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def _rel_err(actual: np.ndarray, expected: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(expected))), 1e-12)
    return float(np.max(np.abs(actual - expected))) / scale


def check_conv2d(rng: np.random.Generator) -> CheckResult:
    x = rng.standard_normal((2, 8, 8)).astype(np.float32)
    w = rng.standard_normal((3, 2, 3, 3)).astype(np.float32)
    b = rng.standard_normal(3).astype(np.float32)
    actual = ops.conv2d(torch.from_numpy(x), torch.from_numpy(w), torch.from_numpy(b)).numpy()
    err = _rel_err(actual, oracle_conv2d(x, w, b))
    return CheckResult('conv2d', err <= KERNEL_RTOL, 'max relative error {:.2e}'.format(err))


def check_maxpool2d(rng: np.random.Generator) -> CheckResult:
    x = rng.standard_normal((2, 4, 4)).astype(np.float32)
    actual = ops.maxpool2d(torch.from_numpy(x)).numpy()
    exact = bool(np.array_equal(actual.astype(np.float64), oracle_maxpool2d(x)))
    return CheckResult('maxpool2d', exact, 'exact match' if exact else 'window maxima differ')


def check_dense(rng: np.random.Generator) -> CheckResult:
    x = rng.standard_normal(5).astype(np.float32)
    w = rng.standard_normal((3, 5)).astype(np.float32)
    b = rng.standard_normal(3).astype(np.float32)
    actual = ops.dense(torch.from_numpy(x), torch.from_numpy(w), torch.from_numpy(b)).numpy()
    err = _rel_err(actual, oracle_dense(x, w, b))
    return CheckResult('dense', err <= KERNEL_RTOL, 'max relative error {:.2e}'.format(err))


def check_resize(rng: np.random.Generator) -> CheckResult:
    pixels = rng.integers(0, 256, size=(48, 64)).astype(np.float64) / 255.0
    actual = resize_intensities(torch.from_numpy(pixels), 28).numpy()
    err = float(np.max(np.abs(actual - oracle_resize_bilinear(pixels, 28, 28))))
    return CheckResult('resize', err <= RESIZE_TOL, 'max abs error {:.2e}'.format(err))


def check_pca(rng: np.random.Generator) -> CheckResult:
    X = (rng.standard_normal((30, 20)) @ np.diag(np.linspace(3.0, 0.5, 20))).astype(np.float32)
    model = pca_fit(torch.from_numpy(X), 5)
    oracle = oracle_pca(X, 5)
    comp_err = float(np.max(np.abs(model.components.numpy().astype(np.float64) - oracle.components)))
    proj = pca_transform(model, torch.from_numpy(X)).numpy()
    proj_err = _rel_err(proj, (X.astype(np.float64) - oracle.mean) @ oracle.components.T)
    passed = comp_err <= PCA_TOL and proj_err <= PCA_TOL
    return CheckResult('pca', passed, 'component error {:.2e}, projection error {:.2e}'.format(comp_err, proj_err))


def check_svm(rng: np.random.Generator) -> CheckResult:
    n = 40
    X = np.vstack([rng.normal(-2.0, 1.0, (n // 2, 2)), rng.normal(2.0, 1.0, (n // 2, 2))])
    y = np.hstack([-np.ones(n // 2), np.ones(n // 2)])
    Xb = append_bias(X)
    ours = svm_train_binary(Xb, y, C=10.0, tol=1e-6, max_epochs=10000, seed=0)
    oracle = oracle_svm_dual(Xb, y, C=10.0)
    p_ours = primal_objective(ours.weights, Xb, y, 10.0)
    p_oracle = primal_objective(oracle.weights, Xb, y, 10.0)
    rel = abs(p_ours - p_oracle) / max(abs(p_oracle), 1e-12)
    labels = ['a' if v < 0 else 'b' for v in y]
    model = svm_train_ovr(X, labels, C=10.0, seed=0)
    agree = svm_predict(model, X) == oracle_predict(model.weights, model.classes, X)
    return CheckResult(
        'svm', rel <= SVM_RTOL and agree,
        'primal objective relative gap {:.2e}, predictions {}'.format(rel, 'agree' if agree else 'differ'))


CHECKS: List[Callable[[np.random.Generator], CheckResult]] = [
    check_conv2d, check_maxpool2d, check_dense, check_resize, check_pca, check_svm]


def run_crosschecks(seed: int = 0) -> List[CheckResult]:
    results = []
    for check in CHECKS:
        rng = np.random.default_rng([seed, len(results)])
        results.append(check(rng))
    return results
