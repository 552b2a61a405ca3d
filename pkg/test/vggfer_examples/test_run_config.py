# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import json
import os

import pytest

from vggfer.enum import OnError, PcaSolver, Scheme, TapPoint, ValidationScope
from vggfer.exceptions import ConfigError
from vggfer_examples.expression_recognition.fer_cli import parse_args
from vggfer_examples.expression_recognition.run_config import (
    DEFAULT_N_PCA_GRID, RunConfig, config_path, config_with_name, parse_list)


def test_defaults_without_name():
    config = config_with_name(None)
    assert config == RunConfig()
    assert config.taps == tuple(TapPoint)
    assert config.n_pca_grid == DEFAULT_N_PCA_GRID
    assert config.weights is None


@pytest.mark.parametrize('name', ['vgg19_jaffe', 'vgg19_ckplus', 'vgg19_micro_synthetic'])
def test_bundled_configs_load(name):
    config = config_with_name(name)
    assert config.name == name
    assert config.schemes == (Scheme.HOLDOUT_80_20, Scheme.KFOLD_10, Scheme.JACKKNIFE)
    assert config.n_pca_grid == (50, 100, 150, 200)
    assert os.path.isabs(config.weights)
    assert os.path.isabs(config.output_dir)


def test_micro_config_values(tmpdir, monkeypatch):
    monkeypatch.chdir(str(tmpdir))
    config = config_with_name('vgg19_micro_synthetic')
    assert config.input_size == 64
    assert config.batch_size == 32
    assert config.weights == os.path.join(str(tmpdir), 'weights', 'vgg19_micro.bundle')
    assert config.corpus_root == os.path.join(str(tmpdir), 'data', 'synthetic')
    assert config.svm.C == 1.0
    assert config.c_sweep == ()
    assert config.pca_per_fold
    assert config.solver == PcaSolver.EIGH


def test_ini_path(tmpdir):
    path = tmpdir.join('mine.ini')
    path.write('[PCA]\nN_PCA_GRID: 5,10\nSOLVER: jacobi\n[EVAL]\nSCOPE: train\nSEED: 3\n[CORPUS]\nON_ERROR: skip\n')
    config = config_with_name(str(path))
    assert config.name == 'mine'
    assert config.n_pca_grid == (5, 10)
    assert config.solver == PcaSolver.JACOBI
    assert config.scope == ValidationScope.TRAIN
    assert config.on_error == OnError.SKIP
    assert config.seed == 3
    assert config.weights is None


@pytest.mark.parametrize('body', [
    '[PCA]\nN_PCA_GRID: 5,ten\n',
    '[PCA]\nN_PCA_GRID: 0,10\n',
    '[FEATURES]\nTAPS: block9_pool\n',
    '[EVAL]\nSCHEMES: bootstrap\n',
    '[EVAL]\nSEED: x\n',
    '[SVM]\nC: -1\n'])
def test_invalid_ini(tmpdir, body):
    path = tmpdir.join('bad.ini')
    path.write(body)
    with pytest.raises(ConfigError):
        config_with_name(str(path))


def test_unknown_name_lists_bundled():
    with pytest.raises(ConfigError, match='vgg19_jaffe'):
        config_path('vgg19_nope')


def test_overrides(tmpdir, monkeypatch):
    monkeypatch.chdir(str(tmpdir))
    args = parse_args([
        'evaluate', '--config', 'vgg19_jaffe', '--weights', 'w.bundle', '--seed', '5', '--taps', 'fc1,block2_pool',
        '--n-pca-grid', '10,20', '--schemes', 'jackknife', '--scope', 'train', '--pca-global', '--svm-c', '0.5',
        '--svm-c-sweep', '0.1,1', '--solver', 'jacobi'])
    config = config_with_name(args.config).with_overrides(args)
    assert config.weights == os.path.join(str(tmpdir), 'w.bundle')
    assert config.seed == 5
    assert config.taps == (TapPoint.BLOCK2_POOL, TapPoint.FC1)
    assert config.n_pca_grid == (10, 20)
    assert config.schemes == (Scheme.JACKKNIFE,)
    assert config.scope == ValidationScope.TRAIN
    assert not config.pca_per_fold
    assert config.svm.C == 0.5
    assert config.c_sweep == (0.1, 1.0)
    assert config.solver == PcaSolver.JACOBI
    assert config.corpus_root == config_with_name('vgg19_jaffe').corpus_root


def test_no_overrides_keep_config():
    args = parse_args(['extract', '--config', 'vgg19_ckplus'])
    assert config_with_name('vgg19_ckplus').with_overrides(args) == config_with_name('vgg19_ckplus')


def test_invalid_override():
    args = parse_args(['evaluate', '--n-pca-grid', '10,x'])
    with pytest.raises(ConfigError):
        RunConfig().with_overrides(args)


def test_require():
    with pytest.raises(ConfigError, match='weights'):
        RunConfig().require('weights')


def test_to_dict_is_json():
    data = config_with_name('vgg19_micro_synthetic').to_dict()
    assert json.loads(json.dumps(data)) == data
    assert data['taps'][0] == 'block1_pool'
    assert data['svm'] == {'C': 1.0, 'tol': 1e-4, 'max_epochs': 1000}


def test_parse_list():
    assert parse_list(' 1, 2,,3 ', int) == [1, 2, 3]
    assert parse_list(None) == []
