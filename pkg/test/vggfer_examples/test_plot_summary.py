# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import mock
import pytest

from vggfer.enum import TapPoint
from vggfer.exceptions import ReportError
from vggfer_examples.expression_recognition.plot_summary import main, plot_summary, read_summary

SUMMARY = (
    'layer,n_pca,a_jk,a_10fold,a_test\n'
    'fc1,10,0.500000,,0.400000\n'
    'block4_pool,20,0.900000,0.880000,0.850000\n'
    'block4_pool,10,0.800000,0.790000,0.750000\n')


@pytest.fixture
def summary_dir(tmpdir):
    tmpdir.join('summary.csv').write(SUMMARY)
    return tmpdir


def test_rows_grouped_by_layer(summary_dir):
    summary = read_summary(str(summary_dir))
    assert list(summary) == [TapPoint.BLOCK4_POOL, TapPoint.FC1]
    assert [r.n_pca for r in summary[TapPoint.BLOCK4_POOL]] == [10, 20]
    assert summary[TapPoint.FC1][0].accuracies['a_10fold'] is None
    assert summary[TapPoint.BLOCK4_POOL][1].accuracies['a_jk'] == pytest.approx(0.9)


def test_missing_summary(tmpdir):
    with pytest.raises(ReportError):
        read_summary(str(tmpdir))


def test_unknown_layer(tmpdir):
    path = tmpdir.join('summary.csv')
    path.write('layer,n_pca,a_jk,a_10fold,a_test\nblock9_pool,10,0.5,,0.5\n')
    with pytest.raises(ReportError, match='block9_pool'):
        read_summary(str(path))


def test_missing_columns(tmpdir):
    path = tmpdir.join('summary.csv')
    path.write('layer,n_pca,a_jk\nfc1,10,0.5\n')
    with pytest.raises(ReportError, match='a_test'):
        read_summary(str(path))


def test_writes_png(summary_dir):
    pytest.importorskip('matplotlib')
    out = str(summary_dir.join('curves.png'))
    assert plot_summary(read_summary(str(summary_dir)), out) == out
    with open(out, 'rb') as f:
        assert f.read(8) == b'\x89PNG\r\n\x1a\n'


def test_main_defaults_next_to_summary(summary_dir, capsys):
    pytest.importorskip('matplotlib')
    with mock.patch('sys.argv', ['vggfer_plot_summary', str(summary_dir)]):
        assert main() == 0
    assert summary_dir.join('accuracy.png').check(file=1)
    assert 'accuracy.png' in capsys.readouterr().out


def test_main_missing_summary_is_usage_failure(tmpdir):
    with mock.patch('sys.argv', ['vggfer_plot_summary', str(tmpdir)]):
        assert main() == 2
