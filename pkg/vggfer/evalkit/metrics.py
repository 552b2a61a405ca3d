from collections import OrderedDict
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from vggfer.enum import EXPRESSIONS
from vggfer.exceptions import MetricsError

__all__ = ['Metrics', 'metrics', 'per_class_accuracy']


class Metrics(NamedTuple):
    accuracy: float
    correct: int
    total: int
    confusion: np.ndarray
    classes: Tuple[str, ...]


def metrics(
        predictions: Sequence[str],
        truth: Sequence[str],
        classes: Sequence[str] = EXPRESSIONS) -> Metrics:
    """Accuracy and confusion counts, confusion[i, j] = samples of class i predicted as class j."""
    predictions, truth, classes = list(predictions), list(truth), tuple(classes)
    if len(predictions) != len(truth):
        raise MetricsError("{} predictions for {} ground-truth labels".format(len(predictions), len(truth)))
    if not truth:
        raise MetricsError("Cannot score an empty prediction set")
    index = {c: i for i, c in enumerate(classes)}
    unknown = sorted(set(predictions + truth) - set(index))
    if unknown:
        raise MetricsError("Labels {} are not among classes {}".format(unknown, list(classes)))
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for p, t in zip(predictions, truth):
        confusion[index[t], index[p]] += 1
    correct = int(np.trace(confusion))
    return Metrics(correct / len(truth), correct, len(truth), confusion, classes)


def per_class_accuracy(confusion: np.ndarray, classes: Sequence[str]) -> 'OrderedDict[str, Optional[float]]':
    """Fraction of each class predicted correctly, None for classes absent from the truth."""
    out = OrderedDict()
    for i, c in enumerate(classes):
        support = int(confusion[i].sum())
        out[c] = None if support == 0 else float(confusion[i, i]) / support
    return out
