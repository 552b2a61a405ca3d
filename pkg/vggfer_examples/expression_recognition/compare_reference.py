# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Compare a report's block4_pool row against published accuracies on the licensed datasets.

Only meaningful for runs on the real CK+ subset or JAFFE images with converted ImageNet weights.
"""

import argparse
import sys
from typing import Dict, List, NamedTuple

from vggfer.evalkit import load_report
from vggfer.exceptions import ReportError

DEFAULT_TOLERANCE = 0.05


class Reference(NamedTuple):
    layer: str
    n_pca: int
    a_jk: float
    a_test: float


REFERENCES: Dict[str, Reference] = {
    'ckplus': Reference('block4_pool', 100, 0.9226, 0.9286),
    'jaffe': Reference('block4_pool', 200, 0.9277, 0.9286)}

parser = argparse.ArgumentParser(description='Check a report against published block4_pool accuracies')
parser.add_argument('report', help='report.json or the directory holding it')
parser.add_argument('--dataset', required=True, choices=sorted(REFERENCES), help='Dataset the report was run on')
parser.add_argument('--tolerance', default=DEFAULT_TOLERANCE, type=float, help='Allowed absolute deviation')


def compare(report: dict, reference: Reference, tolerance: float = DEFAULT_TOLERANCE) -> List[str]:
    """Deviations beyond ``tolerance``, empty when the report agrees."""
    rows = [r for r in report['results'] if r['layer'] == reference.layer and r['n_pca'] == reference.n_pca]
    if not rows:
        raise ReportError("Report has no {} n_pca={} row".format(reference.layer, reference.n_pca))
    row = rows[0]
    failures = []
    for key in ('a_jk', 'a_test'):
        expected = getattr(reference, key)
        actual = row.get(key)
        if actual is None:
            failures.append('{} missing'.format(key))
        elif abs(actual - expected) > tolerance:
            failures.append('{} {:.4f} differs from {:.4f} by more than {:.2f}'.format(key, actual, expected, tolerance))
    return failures


def main():
    args = parser.parse_args()
    reference = REFERENCES[args.dataset]
    failures = compare(load_report(args.report), reference, args.tolerance)
    for failure in failures:
        print(failure)
    print('{} {} n_pca={}'.format('FAIL' if failures else 'PASS', reference.layer, reference.n_pca))
    return 1 if failures else 0


if __name__ == '__main__':
    sys.exit(main())
