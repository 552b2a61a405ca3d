# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Validation protocols over precomputed features.

Within every fold PCA and the SVM are fitted on the fold's training rows only; the test rows are
transformed with the training fit. PCA is fitted once per fold at the largest requested component
count and truncated for the smaller ones.
"""

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from vggfer.core.features import FeatureMatrix
from vggfer.core.pca import pca_fit, pca_transform
from vggfer.core.svm import DEFAULT_C, DEFAULT_MAX_EPOCHS, DEFAULT_TOL, svm_predict, svm_train_ovr
from vggfer.enum import EXPRESSIONS, PcaSolver, Scheme, TapPoint, ValidationScope
from vggfer.exceptions import SplitError
from .metrics import metrics
from .split import SplitPlan, make_split

__all__ = ['SvmParams', 'SchemeResult', 'EvalResult', 'run_layer', 'run_config', 'evaluate_grid', 'make_plans']


class SvmParams(NamedTuple):
    C: float = DEFAULT_C
    tol: float = DEFAULT_TOL
    max_epochs: int = DEFAULT_MAX_EPOCHS


@dataclass(eq=False)
class SchemeResult:
    layer: TapPoint
    n_pca: int
    scheme: Scheme
    accuracy: float
    correct: int
    total: int
    fold_accuracies: List[float]
    confusion: np.ndarray
    classes: Tuple[str, ...]
    effective_k: List[int]


@dataclass(eq=False)
class EvalResult:
    layer: TapPoint
    n_pca: int
    schemes: Dict[Scheme, SchemeResult] = field(default_factory=OrderedDict)

    def _accuracy(self, scheme: Scheme) -> Optional[float]:
        result = self.schemes.get(scheme)
        return None if result is None else result.accuracy

    @property
    def config(self) -> Tuple[TapPoint, int]:
        return self.layer, self.n_pca

    @property
    def a_jk(self) -> Optional[float]:
        return self._accuracy(Scheme.JACKKNIFE)

    @property
    def a_10fold(self) -> Optional[float]:
        return self._accuracy(Scheme.KFOLD_10)

    @property
    def a_test(self) -> Optional[float]:
        return self._accuracy(Scheme.HOLDOUT_80_20)

    @property
    def confusion(self) -> Optional[np.ndarray]:
        """Confusion of the held-out test split, else of the first scheme run."""
        result = self.schemes.get(Scheme.HOLDOUT_80_20) or next(iter(self.schemes.values()), None)
        return None if result is None else result.confusion


def _classes(labels: Sequence[str]) -> Tuple[str, ...]:
    distinct = set(labels)
    if distinct <= set(EXPRESSIONS):
        return EXPRESSIONS
    return tuple(sorted(distinct))


def run_layer(
        features: FeatureMatrix,
        n_pca_grid: Sequence[int],
        scheme: Union[Scheme, str],
        svm: SvmParams = SvmParams(),
        seed: int = 0,
        plan: Optional[SplitPlan] = None,
        pca_per_fold: bool = True,
        solver: Union[PcaSolver, str] = PcaSolver.EIGH,
        progress: bool = False) -> 'OrderedDict[int, SchemeResult]':
    """Run one validation scheme on one layer for every component count of the grid.

    Parameters
    ----------
    features : FeatureMatrix
        Labelled rows of a single layer
    n_pca_grid : sequence of int
        Component counts to evaluate
    scheme : Scheme or str
        Validation scheme; folds come from ``plan`` or from make_split(features, scheme, seed)
    svm : SvmParams
        SVM hyperparameters, the SVM seed is ``seed``
    pca_per_fold : bool
        Refit PCA on every fold's training rows (default). False fits it once on all rows of
        ``features`` before folding, which leaks test rows into the projection.

    Returns
    -------
    OrderedDict
        n_pca -> SchemeResult
    """
    scheme = Scheme.parse(scheme)
    if features.labels is None:
        raise SplitError("Validation needs labelled features for {}".format(features.layer))
    grid = sorted(set(int(k) for k in n_pca_grid))
    if not grid or grid[0] < 1:
        raise ValueError("n_pca grid must hold positive integers, got {}".format(list(n_pca_grid)))
    plan = plan if plan is not None else make_split(features, scheme, seed)
    if plan.scheme != scheme:
        raise SplitError("Plan is for {}, not {}".format(plan.scheme.value, scheme.value))
    row_of = {sample_id: row for row, sample_id in enumerate(features.sample_ids)}
    classes = _classes(features.labels)
    max_k = grid[-1]

    global_projection = None
    if not pca_per_fold:
        global_model = pca_fit(features, max_k, solver=solver)
        global_projection = (global_model, pca_transform(global_model, features))

    correct = {k: 0 for k in grid}
    fold_accuracies = {k: [] for k in grid}
    confusion = {k: np.zeros((len(classes), len(classes)), dtype=np.int64) for k in grid}
    effective_k = {k: [] for k in grid}
    total = 0
    folds = tqdm(plan.folds, desc='{} {}'.format(features.layer.value, scheme.value), disable=not progress)
    for fold in folds:
        try:
            train_rows = [row_of[i] for i in fold.train_ids]
            test_rows = [row_of[i] for i in fold.test_ids]
        except KeyError as e:
            raise SplitError("Split references sample {} absent from the {} features".format(e, features.layer))
        train = features.rows(train_rows)
        test = features.rows(test_rows)
        if global_projection is None:
            model = pca_fit(train, max_k, solver=solver)
            z_train = pca_transform(model, train)
            z_test = pca_transform(model, test)
        else:
            model, z_all = global_projection
            z_train = z_all[train_rows]
            z_test = z_all[test_rows]
        total += len(test_rows)
        for k in grid:
            kept = min(k, model.k)
            svm_model = svm_train_ovr(
                z_train[:, :kept], train.labels, C=svm.C, tol=svm.tol, max_epochs=svm.max_epochs, seed=seed)
            predictions = svm_predict(svm_model, z_test[:, :kept])
            scored = metrics(predictions, test.labels, classes)
            correct[k] += scored.correct
            fold_accuracies[k].append(scored.accuracy)
            confusion[k] += scored.confusion
            effective_k[k].append(kept)

    results = OrderedDict()
    for k in grid:
        if scheme == Scheme.KFOLD_10:
            accuracy = float(np.mean(fold_accuracies[k]))
        else:
            accuracy = correct[k] / total
        results[k] = SchemeResult(
            layer=features.layer, n_pca=k, scheme=scheme, accuracy=accuracy, correct=correct[k], total=total,
            fold_accuracies=fold_accuracies[k], confusion=confusion[k], classes=classes,
            effective_k=effective_k[k])
    return results


def run_config(
        features: FeatureMatrix,
        n_pca: int,
        scheme: Union[Scheme, str],
        svm: SvmParams = SvmParams(),
        seed: int = 0,
        **kwargs) -> SchemeResult:
    """Single (layer, n_pca) cell of :func:`run_layer`."""
    return run_layer(features, [n_pca], scheme, svm=svm, seed=seed, **kwargs)[int(n_pca)]


def make_plans(
        features: FeatureMatrix,
        schemes: Iterable[Union[Scheme, str]],
        seed: int = 0,
        scope: Union[ValidationScope, str] = ValidationScope.FULL) -> 'OrderedDict':
    """Scheme -> (split plan, feature rows it applies to or None for all rows).

    With scope ``train`` jackknife and 10-fold only see the training side of the 80/20 holdout.
    """
    scope = ValidationScope.parse(scope)
    schemes = [Scheme.parse(s) for s in schemes]
    holdout = make_split(features, Scheme.HOLDOUT_80_20, seed)
    plans = OrderedDict()
    for scheme in schemes:
        if scheme == Scheme.HOLDOUT_80_20:
            plans[scheme] = (holdout, None)
        elif scope == ValidationScope.TRAIN:
            train_ids = set(holdout.train_ids)
            rows = [r for r, i in enumerate(features.sample_ids) if i in train_ids]
            subset = features.rows(rows)
            plans[scheme] = (make_split(subset, scheme, seed), rows)
        else:
            plans[scheme] = (make_split(features, scheme, seed), None)
    return plans


def evaluate_grid(
        feature_set: Mapping[TapPoint, FeatureMatrix],
        n_pca_grid: Sequence[int],
        schemes: Iterable[Union[Scheme, str]],
        svm: SvmParams = SvmParams(),
        seed: int = 0,
        scope: Union[ValidationScope, str] = ValidationScope.FULL,
        pca_per_fold: bool = True,
        solver: Union[PcaSolver, str] = PcaSolver.EIGH,
        progress: bool = False) -> List[EvalResult]:
    """EvalResult for every (layer, n_pca) cell, shallowest layer first, then increasing n_pca."""
    schemes = [Scheme.parse(s) for s in schemes]
    if not schemes:
        raise ValueError("At least one validation scheme is required")
    grid = sorted(set(int(k) for k in n_pca_grid))
    results = []
    for layer in sorted(feature_set, key=lambda t: TapPoint(t).depth):
        features = feature_set[layer]
        cells = OrderedDict((k, EvalResult(layer=features.layer, n_pca=k)) for k in grid)
        for scheme, (plan, rows) in make_plans(features, schemes, seed, scope).items():
            subset = features if rows is None else features.rows(rows)
            per_k = run_layer(
                subset, grid, scheme, svm=svm, seed=seed, plan=plan, pca_per_fold=pca_per_fold,
                solver=solver, progress=progress)
            for k, result in per_k.items():
                cells[k].schemes[scheme] = result
        results.extend(cells.values())
    return results
