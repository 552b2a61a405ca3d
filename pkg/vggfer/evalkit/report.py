# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""JSON and CSV reports of evaluation grids.

``report.json`` (keys sorted, no timestamps)::

    {"schema_version": 1,
     "provenance": {"library_version": ..., "weights_hash": ..., "corpus_hash": ..., ...},
     "config": {...resolved run configuration...},
     "notes": [...],
     "results": [{"layer": "block4_pool", "n_pca": 100, "a_jk": 0.92, "a_10fold": 0.94, "a_test": 0.93,
                  "effective_k": {...}, "confusion": {"classes": [...], "matrix": [[...]]},
                  "per_class_accuracy": {...}, "schemes": {"jackknife": {...}, ...}}, ...],
     "selection": {...}}

``results.csv`` has one ``layer,n_pca,scheme,accuracy`` row per cell and scheme; ``summary.csv`` one
``layer,n_pca,a_jk,a_10fold,a_test`` row per cell.
"""

import csv
import json
import os
from typing import Any, Dict, List, Optional, Sequence

from vggfer.enum import Scheme, TapPoint
from vggfer.exceptions import ReportError
from vggfer.io.bundle import dump_json
from .metrics import per_class_accuracy
from .protocol import EvalResult
from .selection import SELECTION_NOTE, SelectionResult

__all__ = [
    'write_report', 'load_report', 'report_results', 'append_selection', 'selection_record',
    'REPORT_NAME', 'RESULTS_CSV', 'SUMMARY_CSV', 'SCHEMA_VERSION']

REPORT_NAME = 'report.json'
RESULTS_CSV = 'results.csv'
SUMMARY_CSV = 'summary.csv'
SCHEMA_VERSION = 1
ACCURACY_FORMAT = '{:.6f}'


def _scheme_record(result) -> Dict[str, Any]:
    return {
        'accuracy': result.accuracy,
        'correct': result.correct,
        'total': result.total,
        'fold_accuracies': list(result.fold_accuracies),
        'effective_k': sorted(set(result.effective_k))}


def result_record(result: EvalResult) -> Dict[str, Any]:
    record = {
        'layer': result.layer.value,
        'n_pca': result.n_pca,
        'a_jk': result.a_jk,
        'a_10fold': result.a_10fold,
        'a_test': result.a_test,
        'schemes': {s.value: _scheme_record(r) for s, r in result.schemes.items()}}
    scored = result.schemes.get(Scheme.HOLDOUT_80_20) or next(iter(result.schemes.values()), None)
    if scored is not None:
        record['confusion'] = {'classes': list(scored.classes), 'matrix': scored.confusion.tolist()}
        record['per_class_accuracy'] = dict(per_class_accuracy(scored.confusion, scored.classes))
    return record


def selection_record(selection: SelectionResult) -> Dict[str, Any]:
    def candidate(c):
        return {'layer': c.layer.value, 'n_pca': c.n_pca, 'a_jk': c.a_jk, 'a_test': c.a_test,
                'difference': c.difference}
    return {
        'chosen': candidate(selection.chosen),
        'candidates': [candidate(c) for c in selection.candidates],
        'rationale': selection.rationale(),
        'note': selection.note}


def _fmt(value: Optional[float]) -> str:
    return '' if value is None else ACCURACY_FORMAT.format(value)


def write_report(
        out_dir: str,
        results: Sequence[EvalResult],
        provenance: Dict[str, Any],
        config: Optional[Dict[str, Any]] = None,
        selection: Optional[SelectionResult] = None) -> str:
    """Write report.json, results.csv and summary.csv into ``out_dir``; returns the JSON path."""
    os.makedirs(out_dir, exist_ok=True)
    report = {
        'schema_version': SCHEMA_VERSION,
        'provenance': provenance,
        'config': config or {},
        'notes': [SELECTION_NOTE],
        'results': [result_record(r) for r in results]}
    if selection is not None:
        report['selection'] = selection_record(selection)
    path = os.path.join(out_dir, REPORT_NAME)
    dump_json(report, path)
    with open(os.path.join(out_dir, RESULTS_CSV), 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['layer', 'n_pca', 'scheme', 'accuracy'])
        for r in results:
            for scheme, scheme_result in r.schemes.items():
                writer.writerow([r.layer.value, r.n_pca, scheme.value, _fmt(scheme_result.accuracy)])
    with open(os.path.join(out_dir, SUMMARY_CSV), 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(['layer', 'n_pca', 'a_jk', 'a_10fold', 'a_test'])
        for r in results:
            writer.writerow([r.layer.value, r.n_pca, _fmt(r.a_jk), _fmt(r.a_10fold), _fmt(r.a_test)])
    return path


def _report_path(path: str) -> str:
    return os.path.join(path, REPORT_NAME) if os.path.isdir(path) else path


def load_report(path: str) -> Dict[str, Any]:
    path = _report_path(path)
    if not os.path.isfile(path):
        raise ReportError("Report {} does not exist".format(path))
    try:
        with open(path, 'r', encoding='utf-8') as f:
            report = json.load(f)
    except (ValueError, UnicodeDecodeError) as e:
        raise ReportError("Report {} is not valid JSON: {}".format(path, e))
    if not isinstance(report, dict) or not isinstance(report.get('results'), list):
        raise ReportError("Report {} has no 'results' list".format(path))
    for row in report['results']:
        if not isinstance(row, dict) or 'layer' not in row or 'n_pca' not in row:
            raise ReportError("Report {} has a result row without layer and n_pca: {!r}".format(path, row))
        try:
            TapPoint.parse(row['layer'])
        except (ValueError, TypeError):
            raise ReportError("Report {} names an unknown layer {!r}".format(path, row['layer']))
    return report


def report_results(report: Dict[str, Any]) -> List[Dict[str, Any]]:
    return [
        {'layer': r['layer'], 'n_pca': r['n_pca'], 'a_jk': r.get('a_jk'), 'a_test': r.get('a_test')}
        for r in report['results']]


def append_selection(path: str, selection: SelectionResult) -> Dict[str, Any]:
    """Store the selection block in an existing report."""
    report = load_report(path)
    report['selection'] = selection_record(selection)
    dump_json(report, _report_path(path))
    return report
