# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Deterministic split plans: stratified 80/20 holdout, stratified k-fold and leave-one-out."""

import math
import os
import warnings
from collections import OrderedDict
from typing import Dict, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from vggfer.enum import Scheme
from vggfer.exceptions import SplitError, StratificationWarning

__all__ = ['Fold', 'SplitPlan', 'make_split', 'HOLDOUT_TEST_FRACTION', 'KFOLD_FOLDS']

HOLDOUT_TEST_FRACTION = 0.2
KFOLD_FOLDS = 10


class Fold(NamedTuple):
    train_ids: Tuple[str, ...]
    test_ids: Tuple[str, ...]


class SplitPlan(NamedTuple):
    scheme: Scheme
    seed: int
    folds: Tuple[Fold, ...]

    @property
    def train_ids(self) -> Tuple[str, ...]:
        return self.folds[0].train_ids

    @property
    def test_ids(self) -> Tuple[str, ...]:
        return self.folds[0].test_ids


def _pairs(samples) -> List[Tuple[str, str]]:
    if hasattr(samples, 'sample_ids'):
        return list(zip(samples.sample_ids, samples.labels))
    if hasattr(samples, 'ids'):
        return list(zip(samples.ids, samples.labels))
    return [(str(i), str(l)) for i, l in samples]


def _by_class(pairs: Sequence[Tuple[str, str]]) -> 'OrderedDict[str, List[str]]':
    groups = OrderedDict()
    for label in sorted(set(l for _, l in pairs)):
        groups[label] = [i for i, l in pairs if l == label]
    return groups


def _in_corpus_order(pairs, selected) -> Tuple[str, ...]:
    return tuple(i for i, _ in pairs if i in selected)


def _holdout(pairs, rng: np.random.Generator) -> Tuple[Fold, ...]:
    n = len(pairs)
    groups = _by_class(pairs)
    n_test = max(1, int(math.floor(HOLDOUT_TEST_FRACTION * n + 0.5)))
    quota = OrderedDict((label, int(math.floor(HOLDOUT_TEST_FRACTION * len(ids)))) for label, ids in groups.items())
    remainder = n_test - sum(quota.values())
    labels = list(groups)
    order = [labels[i] for i in rng.permutation(len(labels))]
    # first pass keeps at least one training sample per class, second pass only if still short
    for keep in (1, 0):
        for label in order:
            if remainder > 0 and quota[label] + keep < len(groups[label]):
                quota[label] += 1
                remainder -= 1
    test = set()
    for label, ids in groups.items():
        order = rng.permutation(len(ids))
        test.update(ids[i] for i in order[:quota[label]])
    train = set(i for i, _ in pairs) - test
    return (Fold(_in_corpus_order(pairs, train), _in_corpus_order(pairs, test)),)


def _kfold(pairs, rng: np.random.Generator, n_folds: int) -> Tuple[Fold, ...]:
    groups = _by_class(pairs)
    small = [label for label, ids in groups.items() if len(ids) < n_folds]
    if small:
        warnings.warn(
            "Classes {} have fewer samples than {} folds and cannot appear in every fold".format(small, n_folds),
            StratificationWarning)
    assignment: Dict[str, int] = {}
    offset = 0
    for label, ids in groups.items():
        order = rng.permutation(len(ids))
        for j, i in enumerate(order):
            assignment[ids[i]] = (offset + j) % n_folds
        offset += len(ids)
    folds = []
    for f in range(n_folds):
        test = set(i for i, a in assignment.items() if a == f)
        train = set(assignment) - test
        folds.append(Fold(_in_corpus_order(pairs, train), _in_corpus_order(pairs, test)))
    return tuple(folds)


def _jackknife(pairs) -> Tuple[Fold, ...]:
    ids = sorted((i for i, _ in pairs), key=os.fsencode)
    return tuple(Fold(tuple(j for j in ids if j != i), (i,)) for i in ids)


def make_split(samples, scheme: Union[Scheme, str], seed: int = 0, n_folds: int = KFOLD_FOLDS) -> SplitPlan:
    """Build the folds of a validation scheme.

    Parameters
    ----------
    samples : FeatureMatrix, Corpus or sequence of (id, label)
        Samples to split, ids unique
    scheme : Scheme or str
        holdout_80_20, kfold_10 or jackknife
    seed : int
        Seed of every shuffle; equal seeds give equal plans

    Returns
    -------
    SplitPlan
    """
    scheme = Scheme.parse(scheme)
    pairs = _pairs(samples)
    ids = [i for i, _ in pairs]
    if len(set(ids)) != len(ids):
        raise SplitError("Sample ids must be unique")
    minimum = n_folds if scheme == Scheme.KFOLD_10 else 2
    if len(pairs) < minimum:
        raise SplitError("{} needs at least {} samples, got {}".format(scheme.value, minimum, len(pairs)))
    rng = np.random.default_rng(seed)
    if scheme == Scheme.HOLDOUT_80_20:
        folds = _holdout(pairs, rng)
    elif scheme == Scheme.KFOLD_10:
        folds = _kfold(pairs, rng, n_folds)
    else:
        folds = _jackknife(pairs)
    return SplitPlan(scheme=scheme, seed=seed, folds=folds)
