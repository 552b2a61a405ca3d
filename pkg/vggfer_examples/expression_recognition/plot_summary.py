# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Plot accuracy against the number of PCA components, one panel per tap point.

Reads the ``summary.csv`` written by ``vggfer evaluate`` and draws the jackknife, 10-fold and held-out
test curves of every layer. Needs matplotlib (``pip install vggfer[plot]``).
"""

import argparse
import csv
import os
import sys
from collections import OrderedDict
from typing import Dict, List, NamedTuple, Optional

from vggfer.enum import TapPoint
from vggfer.evalkit.report import SUMMARY_CSV
from vggfer.exceptions import ReportError

CURVES = OrderedDict([('a_jk', 'jackknife'), ('a_10fold', '10-fold'), ('a_test', 'test')])

parser = argparse.ArgumentParser(description='Plot accuracy curves from an evaluation summary')
parser.add_argument('summary', help='summary.csv or the run directory holding it')
parser.add_argument('--out', default=None, help='Image to write, defaults to accuracy.png next to the summary')
parser.add_argument('--dpi', default=150, type=int, help='Resolution of the written image')


class SummaryRow(NamedTuple):
    n_pca: int
    accuracies: Dict[str, Optional[float]]


def _summary_path(path: str) -> str:
    return os.path.join(path, SUMMARY_CSV) if os.path.isdir(path) else path


def _accuracy(value: str) -> Optional[float]:
    return float(value) if value else None


def read_summary(path: str) -> 'OrderedDict[TapPoint, List[SummaryRow]]':
    """Rows grouped by layer, shallowest first, each group sorted by n_pca."""
    path = _summary_path(path)
    if not os.path.isfile(path):
        raise ReportError("Summary {} does not exist".format(path))
    layers = {}
    with open(path, newline='', encoding='utf-8') as f:
        reader = csv.DictReader(f)
        missing = {'layer', 'n_pca'}.union(CURVES).difference(reader.fieldnames or ())
        if missing:
            raise ReportError("Summary {} lacks columns {}".format(path, sorted(missing)))
        for row in reader:
            try:
                layer = TapPoint.parse(row['layer'])
                entry = SummaryRow(int(row['n_pca']), {k: _accuracy(row[k]) for k in CURVES})
            except ValueError as e:
                raise ReportError("Summary {}: malformed row {!r}: {}".format(path, row, e))
            layers.setdefault(layer, []).append(entry)
    if not layers:
        raise ReportError("Summary {} has no rows".format(path))
    return OrderedDict(
        (layer, sorted(layers[layer], key=lambda r: r.n_pca)) for layer in sorted(layers, key=lambda t: t.depth))


def plot_summary(summary: 'OrderedDict[TapPoint, List[SummaryRow]]', out: str, dpi: int = 150) -> str:
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, len(summary), figsize=(3.2 * len(summary), 3.2), sharey=True, squeeze=False)
    for ax, (layer, rows) in zip(axes[0], summary.items()):
        for key, label in CURVES.items():
            points = [(r.n_pca, r.accuracies[key]) for r in rows if r.accuracies[key] is not None]
            if points:
                xs, ys = zip(*points)
                ax.plot(xs, ys, marker='o', markersize=3, label=label)
        ax.set_title(layer.value)
        ax.set_xlabel('PCA components')
        ax.spines['right'].set_visible(False)
        ax.spines['top'].set_visible(False)
    axes[0][0].set_ylabel('accuracy')
    axes[0][0].legend(loc='lower right', fontsize='small')
    fig.tight_layout()
    fig.savefig(out, dpi=dpi)
    plt.close(fig)
    return out


def main():
    args = parser.parse_args()
    try:
        summary = read_summary(args.summary)
    except ReportError as e:
        print(e)
        return e.exit_code
    out = args.out or os.path.join(os.path.dirname(_summary_path(args.summary)), 'accuracy.png')
    print('Wrote {}'.format(plot_summary(summary, out, args.dpi)))
    return 0


if __name__ == '__main__':
    sys.exit(main())
