# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import numpy as np
import pytest
import torch
from hypothesis import settings, HealthCheck
from hypothesis import seed as set_seed

# Remove Hypothesis check for too slow tests. Solver and network properties run full fits per example.
settings.register_profile("standard", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("standard")

SEED = 123456
torch.random.manual_seed(SEED)
set_seed(SEED)


@pytest.fixture(scope='session')
def synthetic_root(tmp_path_factory):
    from vggfer.data import generate_synthetic_corpus
    root = str(tmp_path_factory.mktemp('synthetic'))
    generate_synthetic_corpus(root, seed=42, per_class=30)
    return root


@pytest.fixture(scope='session')
def micro_weights(tmp_path_factory):
    from vggfer.nn import make_micro_bundle
    path = str(tmp_path_factory.mktemp('weights').joinpath('vgg19_micro.bundle'))
    make_micro_bundle(path, seed=0)
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope='session')
def small_root(tmp_path_factory):
    from vggfer.data import generate_synthetic_corpus
    root = str(tmp_path_factory.mktemp('synthetic_small'))
    generate_synthetic_corpus(root, seed=7, per_class=4, size=(64, 64))
    return root
