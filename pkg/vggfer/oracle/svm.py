"""Slow reference solver for the hinge-loss SVM dual and brute-force prediction."""

from typing import List, NamedTuple, Sequence

import numpy as np
import scipy.linalg

from vggfer.exceptions import OracleScopeError

__all__ = ['OracleSvm', 'oracle_svm_dual', 'oracle_decision_values', 'oracle_predict', 'MAX_ORACLE_SAMPLES']

MAX_ORACLE_SAMPLES = 200


class OracleSvm(NamedTuple):
    weights: np.ndarray
    alpha: np.ndarray
    iterations: int
    gradient_norm: float


def oracle_svm_dual(X, y, C: float, tol: float = 1e-8, max_iter: int = 500000) -> OracleSvm:
    """Accelerated projected gradient ascent on max_a sum(a) - 0.5 a'Qa, 0 <= a <= C, Q = (yx)(yx)'.

    Stops when the norm of the projected-gradient step, scaled back by the Lipschitz constant,
    falls below ``tol``. Momentum is reset whenever the dual objective would decrease.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    if n > MAX_ORACLE_SAMPLES:
        raise OracleScopeError("oracle_svm_dual handles at most {} samples, got {}".format(MAX_ORACLE_SAMPLES, n))
    Z = y[:, None] * X
    Q = Z @ Z.T
    lipschitz = max(float(scipy.linalg.eigvalsh(Q)[-1]), 1e-12)

    def objective(a):
        return a.sum() - 0.5 * a @ Q @ a

    alpha = np.zeros(n)
    momentum = alpha.copy()
    t = 1.0
    gradient_norm = np.inf
    iteration = 0
    for iteration in range(1, max_iter + 1):
        grad = 1.0 - Q @ momentum
        candidate = np.clip(momentum + grad / lipschitz, 0.0, C)
        step = np.clip(alpha + (1.0 - Q @ alpha) / lipschitz, 0.0, C) - alpha
        gradient_norm = float(np.linalg.norm(step) * lipschitz)
        if gradient_norm < tol:
            break
        if objective(candidate) < objective(alpha):
            momentum, t = alpha.copy(), 1.0
            continue
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        momentum = candidate + ((t - 1.0) / t_next) * (candidate - alpha)
        alpha, t = candidate, t_next
    return OracleSvm(Z.T @ alpha, alpha, iteration, gradient_norm)


def oracle_decision_values(weights, X) -> List[List[float]]:
    """Explicit per-class dot products w_c . [x; 1]."""
    weights = np.asarray(weights, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    rows = []
    for x in X:
        augmented = list(x) + [1.0]
        rows.append([sum(w[i] * augmented[i] for i in range(len(augmented))) for w in weights])
    return rows


def oracle_predict(weights, classes: Sequence[str], X) -> List[str]:
    out = []
    for values in oracle_decision_values(weights, X):
        best = 0
        for c in range(1, len(values)):
            if values[c] > values[best]:
                best = c
        out.append(classes[best])
    return out
