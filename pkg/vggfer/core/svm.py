# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Linear SVM trained by dual coordinate descent on the L1-loss (hinge) dual.

The binary problem is

    min_w 0.5 * ||w||^2 + C * sum_i max(0, 1 - y_i * w.x_i)

solved over its box-constrained dual, alpha in [0, C]^n, while maintaining w = sum_i alpha_i y_i x_i.
Multiclass models are one-vs-rest with a bias handled as an appended constant-1 feature.
"""

import warnings
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import torch

from vggfer import jit
from vggfer.enum import EXPRESSIONS
from vggfer.exceptions import (
    ConvergenceWarning, DegenerateProblemWarning, FeatureDimensionError, InsufficientClassesError,
    InsufficientSamplesError, NonFiniteInputError)
from vggfer.io.bundle import read_bundle, write_bundle

__all__ = [
    'BinarySvm', 'SvmModel', 'svm_train_binary', 'svm_train_ovr', 'svm_decision', 'svm_predict',
    'primal_objective', 'dual_objective', 'append_bias']

DEFAULT_C = 1.0
DEFAULT_TOL = 1e-4
DEFAULT_MAX_EPOCHS = 1000
# Epochs whose visiting orders are drawn per call into the compiled kernel
EPOCH_CHUNK = 16


@jit.njit
def _projected_gradient(g, alpha_i, C):
    if alpha_i <= 0.0:
        return min(g, 0.0)
    if alpha_i >= C:
        return max(g, 0.0)
    return g


@jit.njit
def _dual_cd_chunk(X, y, sq_norms, alpha, w, orders, C, tol, objectives, first_epoch):
    n = X.shape[0]
    for e in range(orders.shape[0]):
        max_violation = 0.0
        for j in range(n):
            i = orders[e, j]
            g = y[i] * np.dot(w, X[i]) - 1.0
            pg = _projected_gradient(g, alpha[i], C)
            if abs(pg) > max_violation:
                max_violation = abs(pg)
            if pg != 0.0 and sq_norms[i] > 0.0:
                old = alpha[i]
                new = min(max(old - g / sq_norms[i], 0.0), C)
                alpha[i] = new
                step = (new - old) * y[i]
                if step != 0.0:
                    w += step * X[i]
        objectives[first_epoch + e] = np.sum(alpha) - 0.5 * np.dot(w, w)
        if max_violation < tol:
            # the epoch moved w after early checks, so confirm KKT at the final point
            satisfied = True
            for i in range(n):
                g = y[i] * np.dot(w, X[i]) - 1.0
                if abs(_projected_gradient(g, alpha[i], C)) >= tol:
                    satisfied = False
                    break
            if satisfied:
                return e + 1, True
    return orders.shape[0], False


class BinarySvm(NamedTuple):
    weights: np.ndarray
    alpha: np.ndarray
    epochs: int
    converged: bool
    dual_objectives: np.ndarray


def _as_float64(x, name: str) -> np.ndarray:
    if isinstance(x, torch.Tensor):
        x = x.detach().cpu().numpy()
    x = np.ascontiguousarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteInputError("{} contains NaN or Inf".format(name))
    return x


def append_bias(X) -> np.ndarray:
    X = _as_float64(X, 'SVM input')
    return np.hstack([X, np.ones((X.shape[0], 1), dtype=np.float64)])


def primal_objective(w: np.ndarray, X: np.ndarray, y: np.ndarray, C: float) -> float:
    w = np.asarray(w, dtype=np.float64)
    margins = 1.0 - y * (X @ w)
    return float(0.5 * w @ w + C * np.maximum(margins, 0.0).sum())


def dual_objective(alpha: np.ndarray, w: np.ndarray) -> float:
    return float(np.sum(alpha) - 0.5 * np.dot(w, w))


def svm_train_binary(
        X,
        y,
        C: float = DEFAULT_C,
        tol: float = DEFAULT_TOL,
        max_epochs: int = DEFAULT_MAX_EPOCHS,
        seed: int = 0) -> BinarySvm:
    """Dual coordinate descent for one binary hinge-loss problem.

    Parameters
    ----------
    X : array-like
        (n, d) samples, bias column already appended
    y : array-like
        n labels in {-1, +1}
    C : float
        Box bound on the dual variables
    tol : float
        Stop once every projected gradient is below tol in absolute value
    max_epochs : int
        Upper bound on passes over the data
    seed : int
        Seed of the per-epoch visiting order

    Returns
    -------
    BinarySvm
        Weights, dual variables, epochs used, convergence flag and the dual objective after each epoch
    """
    X = _as_float64(X, 'SVM input')
    y = _as_float64(y, 'SVM labels')
    if X.ndim != 2 or X.shape[0] < 1:
        raise InsufficientSamplesError("SVM needs a non-empty (n, d) matrix, got shape {}".format(X.shape))
    if y.shape != (X.shape[0],):
        raise FeatureDimensionError("{} labels for {} samples".format(y.shape, X.shape[0]))
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("Binary labels must be -1 or +1")
    if C <= 0.0 or tol <= 0.0 or max_epochs < 1:
        raise ValueError("Need C > 0, tol > 0 and max_epochs >= 1, got {}, {}, {}".format(C, tol, max_epochs))
    n, d = X.shape
    if np.all(y == y[0]):
        warnings.warn(
            "Binary problem has a single class ({:+.0f}), returning the zero model".format(y[0]),
            DegenerateProblemWarning)
        return BinarySvm(np.zeros(d), np.zeros(n), 0, True, np.zeros(0))

    rng = np.random.default_rng(seed)
    alpha = np.zeros(n, dtype=np.float64)
    w = np.zeros(d, dtype=np.float64)
    sq_norms = np.einsum('ij,ij->i', X, X)
    objectives = np.zeros(max_epochs, dtype=np.float64)
    epochs, converged = 0, False
    while epochs < max_epochs and not converged:
        chunk = min(EPOCH_CHUNK, max_epochs - epochs)
        orders = np.stack([rng.permutation(n) for _ in range(chunk)]).astype(np.int64)
        ran, converged = _dual_cd_chunk(X, y, sq_norms, alpha, w, orders, C, tol, objectives, epochs)
        epochs += int(ran)
    if not converged:
        warnings.warn(
            "Dual coordinate descent stopped at max_epochs={} before reaching tol={}".format(max_epochs, tol),
            ConvergenceWarning)
    return BinarySvm(w, alpha, epochs, bool(converged), objectives[:epochs].copy())


def _class_order(labels: Sequence[str]) -> Tuple[str, ...]:
    distinct = set(labels)
    if distinct <= set(EXPRESSIONS):
        return tuple(e for e in EXPRESSIONS if e in distinct)
    return tuple(sorted(distinct))


@dataclass(frozen=True, eq=False)
class SvmModel:
    weights: np.ndarray
    classes: Tuple[str, ...]
    C: float = DEFAULT_C
    training_meta: dict = field(default_factory=dict)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def k(self) -> int:
        return int(self.weights.shape[1]) - 1

    def save(self, path: str) -> str:
        sidecar = {'kind': 'svm', 'classes': list(self.classes), 'C': self.C, 'training_meta': self.training_meta}
        return write_bundle(path, {'weights': self.weights}, source='vggfer svm', sidecar=sidecar)

    @classmethod
    def load(cls, path: str) -> 'SvmModel':
        entries, _, sidecar = read_bundle(path)
        sidecar = sidecar or {}
        return cls(
            weights=entries['weights'].numpy(),
            classes=tuple(sidecar['classes']),
            C=float(sidecar.get('C', DEFAULT_C)),
            training_meta=sidecar.get('training_meta', {}))


def svm_train_ovr(
        X_reduced,
        labels: Sequence[str],
        C: float = DEFAULT_C,
        tol: float = DEFAULT_TOL,
        max_epochs: int = DEFAULT_MAX_EPOCHS,
        seed: int = 0,
        classes: Optional[Sequence[str]] = None) -> SvmModel:
    """One-vs-rest training; class c is seeded with seed + its index in the class order."""
    labels = list(labels)
    classes = tuple(classes) if classes is not None else _class_order(labels)
    if len(set(labels)) < 2:
        raise InsufficientClassesError(
            "One-vs-rest training needs at least 2 distinct labels, got {}".format(sorted(set(labels))))
    Xb = append_bias(X_reduced)
    if Xb.shape[0] != len(labels):
        raise FeatureDimensionError("{} labels for {} samples".format(len(labels), Xb.shape[0]))
    label_array = np.asarray(labels, dtype=object)
    rows, epochs, converged = [], [], []
    for index, cls in enumerate(classes):
        y = np.where(label_array == cls, 1.0, -1.0)
        result = svm_train_binary(Xb, y, C=C, tol=tol, max_epochs=max_epochs, seed=seed + index)
        rows.append(result.weights)
        epochs.append(result.epochs)
        converged.append(result.converged)
    meta = {'tol': tol, 'max_epochs': max_epochs, 'seed': seed, 'epochs': epochs, 'converged': converged}
    return SvmModel(weights=np.stack(rows).astype(np.float32), classes=classes, C=C, training_meta=meta)


def svm_decision(model: SvmModel, X_reduced) -> np.ndarray:
    """(n, n_classes) decision values w_c . [x; 1] in float64."""
    X = _as_float64(X_reduced, 'SVM input')
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != model.k:
        raise FeatureDimensionError(
            "SVM model expects {} features, got matrix of shape {}".format(model.k, X.shape))
    Xb = np.hstack([X, np.ones((X.shape[0], 1), dtype=np.float64)])
    return Xb @ model.weights.astype(np.float64).T


def svm_predict(model: SvmModel, X_reduced) -> List[str]:
    """Label of the largest decision value; ties go to the earliest class in ``model.classes``."""
    decisions = svm_decision(model, X_reduced)
    return [model.classes[i] for i in np.argmax(decisions, axis=1)]
