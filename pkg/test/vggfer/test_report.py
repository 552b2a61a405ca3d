# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import csv
import os

import pytest

from vggfer.enum import Scheme, TapPoint
from vggfer.evalkit import (
    append_selection, evaluate_grid, load_report, report_results, select_parameters, write_report)
from vggfer.exceptions import ReportError
from common import *

PROVENANCE = {'library_version': '0.1.0', 'weights_hash': 'w' * 64, 'corpus_hash': 'c' * 64, 'seed': 0}


@pytest.fixture(scope='module')
def grid_results():
    feature_set = {
        TapPoint.BLOCK5_POOL: blob_features(3, 12, layer=TapPoint.BLOCK5_POOL, seed=1),
        TapPoint.BLOCK4_POOL: blob_features(3, 12, layer=TapPoint.BLOCK4_POOL, seed=2)}
    return evaluate_grid(feature_set, [4, 2], [Scheme.JACKKNIFE, Scheme.HOLDOUT_80_20], seed=0)


def read_csv(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


def test_results_csv_rows(grid_results, tmpdir):
    write_report(str(tmpdir), grid_results, PROVENANCE)
    rows = read_csv(str(tmpdir.join('results.csv')))
    assert rows[0] == ['layer', 'n_pca', 'scheme', 'accuracy']
    assert [r[:3] for r in rows[1:]] == [
        ['block4_pool', '2', 'jackknife'], ['block4_pool', '2', 'holdout_80_20'],
        ['block4_pool', '4', 'jackknife'], ['block4_pool', '4', 'holdout_80_20'],
        ['block5_pool', '2', 'jackknife'], ['block5_pool', '2', 'holdout_80_20'],
        ['block5_pool', '4', 'jackknife'], ['block5_pool', '4', 'holdout_80_20']]
    assert all(0.0 <= float(r[3]) <= 1.0 for r in rows[1:])


def test_summary_csv_leaves_missing_schemes_blank(grid_results, tmpdir):
    write_report(str(tmpdir), grid_results, PROVENANCE)
    rows = read_csv(str(tmpdir.join('summary.csv')))
    assert rows[0] == ['layer', 'n_pca', 'a_jk', 'a_10fold', 'a_test']
    assert len(rows) == 5
    assert all(r[3] == '' for r in rows[1:])
    assert all(len(r[2].split('.')[1]) == 6 for r in rows[1:])


def test_output_is_byte_identical(grid_results, tmpdir):
    first, second = tmpdir.mkdir('a'), tmpdir.mkdir('b')
    write_report(str(first), grid_results, PROVENANCE, config={'seed': 0})
    write_report(str(second), grid_results, PROVENANCE, config={'seed': 0})
    for name in ('report.json', 'results.csv', 'summary.csv'):
        assert first.join(name).read_binary() == second.join(name).read_binary()


def test_json_contents(grid_results, tmpdir):
    report = load_report(write_report(str(tmpdir), grid_results, PROVENANCE, config={'seed': 0}))
    assert report['schema_version'] == 1
    assert report['provenance'] == PROVENANCE
    assert report['config'] == {'seed': 0}
    assert 'selection' not in report
    row = report['results'][0]
    assert (row['layer'], row['n_pca']) == ('block4_pool', 2)
    assert row['a_10fold'] is None
    assert row['a_jk'] == grid_results[0].a_jk
    assert row['schemes']['jackknife']['total'] == 21
    assert row['schemes']['holdout_80_20']['effective_k'] == [2]
    assert len(row['confusion']['matrix']) == 7
    assert set(row['per_class_accuracy']) == set(EXPRESSIONS)


def test_load_from_directory(grid_results, tmpdir):
    write_report(str(tmpdir), grid_results, PROVENANCE)
    assert len(report_results(load_report(str(tmpdir)))) == 4


def test_append_selection(tmpdir):
    results = table_results(JAFFE_A_JK, JAFFE_A_TEST, 200)
    path = write_report(str(tmpdir), results, PROVENANCE)
    selection = select_parameters(report_results(load_report(path)))
    append_selection(path, selection)
    stored = load_report(path)['selection']
    assert stored['chosen'] == {
        'layer': 'block4_pool', 'n_pca': 200, 'a_jk': 0.9277, 'a_test': 0.9286,
        'difference': pytest.approx(0.0009)}
    assert len(stored['candidates']) == 2
    assert 'unbiased' in stored['note']


def test_selection_written_with_report(tmpdir):
    results = table_results(CKPLUS_A_JK, CKPLUS_A_TEST, 100)
    path = write_report(str(tmpdir), results, PROVENANCE, selection=select_parameters(results))
    assert load_report(path)['selection']['chosen']['layer'] == 'block4_pool'


def test_missing_report(tmpdir):
    with pytest.raises(ReportError):
        load_report(str(tmpdir.join('report.json')))


def test_malformed_report(tmpdir):
    path = tmpdir.join('report.json')
    path.write('{not json')
    with pytest.raises(ReportError):
        load_report(str(path))
    path.write('{"results": [{"n_pca": 3}]}')
    with pytest.raises(ReportError, match='layer'):
        load_report(str(path))
    path.write('[]')
    with pytest.raises(ReportError):
        load_report(str(path))
    path.write('{"results": [{"layer": "block9_pool", "n_pca": 3}]}')
    with pytest.raises(ReportError, match='block9_pool'):
        load_report(str(path))
