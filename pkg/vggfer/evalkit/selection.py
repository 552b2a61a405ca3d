"""Two-step parameter selection.

Step one shortlists the two configurations with the highest jackknife accuracy. Step two picks,
among those, the configuration whose jackknife and held-out test accuracies differ least.
"""

from typing import Iterable, NamedTuple, Tuple, Union

from vggfer.enum import TapPoint
from vggfer.exceptions import SelectionError

__all__ = ['Candidate', 'SelectionResult', 'select_parameters', 'SELECTION_NOTE']

SHORTLIST_SIZE = 2
# differences are compared after rounding so that decimal table values tie exactly
_DIFF_DIGITS = 12

SELECTION_NOTE = (
    "Step two of the selection compares against held-out test accuracy, so a_test of the chosen "
    "configuration is not an unbiased estimate of generalization.")


class Candidate(NamedTuple):
    layer: TapPoint
    n_pca: int
    a_jk: float
    a_test: float

    @property
    def difference(self) -> float:
        return round(abs(self.a_jk - self.a_test), _DIFF_DIGITS)


class SelectionResult(NamedTuple):
    chosen: Candidate
    candidates: Tuple[Candidate, ...]
    differences: Tuple[float, ...]
    note: str = SELECTION_NOTE

    def rationale(self) -> str:
        rows = ', '.join(
            '{} / n_pca={}: |{:.4f} - {:.4f}| = {:.4f}'.format(c.layer.value, c.n_pca, c.a_jk, c.a_test, d)
            for c, d in zip(self.candidates, self.differences))
        return 'shortlist by a_jk: {}; chosen {} / n_pca={}'.format(rows, self.chosen.layer.value, self.chosen.n_pca)


def _candidate(result) -> Candidate:
    if isinstance(result, dict):
        layer, n_pca, a_jk, a_test = result.get('layer'), result.get('n_pca'), result.get('a_jk'), result.get('a_test')
    else:
        layer, n_pca, a_jk, a_test = result.layer, result.n_pca, result.a_jk, result.a_test
    if a_jk is None or a_test is None:
        raise SelectionError(
            "Configuration {} / n_pca={} lacks a_jk or a_test; run jackknife and holdout first".format(layer, n_pca))
    try:
        return Candidate(TapPoint.parse(layer), int(n_pca), float(a_jk), float(a_test))
    except (ValueError, TypeError) as e:
        raise SelectionError("Configuration {} / n_pca={} is malformed: {}".format(layer, n_pca, e))


def select_parameters(results: Iterable[Union[dict, object]]) -> SelectionResult:
    """Apply the two-step rule to (layer, n_pca, a_jk, a_test) records.

    Ties in a_jk go to the shallower layer, then the smaller n_pca. Ties in the difference go to
    the higher a_test, then to the earlier shortlisted candidate.
    """
    candidates = [_candidate(r) for r in results]
    if len(candidates) < SHORTLIST_SIZE:
        raise SelectionError(
            "Selection needs at least {} results, got {}".format(SHORTLIST_SIZE, len(candidates)))
    ranked = sorted(candidates, key=lambda c: (-c.a_jk, c.layer.depth, c.n_pca))
    shortlist = tuple(ranked[:SHORTLIST_SIZE])
    best = min(range(len(shortlist)), key=lambda i: (shortlist[i].difference, -shortlist[i].a_test, i))
    return SelectionResult(
        chosen=shortlist[best],
        candidates=shortlist,
        differences=tuple(c.difference for c in shortlist))
