# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

from collections import OrderedDict

import mock
import numpy as np
import pytest
import torch

from vggfer.enum import TapPoint
from vggfer.exceptions import BundleShapeError, MissingEntryError, ShapeMismatchError, UnexpectedEntryError
from vggfer.io.bundle import write_bundle
from vggfer.nn import FULL_SPEC, MICRO_SPEC, VGG19, forward_with_taps, load_bundle, make_micro_bundle
from vggfer.nn.vgg import WeightBundle, parse_taps
from vggfer.oracle import oracle_conv2d, oracle_dense, oracle_maxpool2d, oracle_relu
from common import *

FULL_TAP_SIZES = OrderedDict([
    (TapPoint.BLOCK1_POOL, 802816),
    (TapPoint.BLOCK2_POOL, 401408),
    (TapPoint.BLOCK3_POOL, 200704),
    (TapPoint.BLOCK4_POOL, 100352),
    (TapPoint.BLOCK5_POOL, 25088),
    (TapPoint.FC1, 4096)])


class TestLayerTable:

    def test_row_count(self):
        rows = FULL_SPEC.layer_output_shapes()
        assert len(rows) == 25
        assert [r[0] for r in rows][:3] == ['block1_conv1', 'block1_conv2', 'block1_pool']
        assert [r[0] for r in rows][-4:] == ['flatten', 'fc1', 'fc2', 'predictions']

    @pytest.mark.parametrize('name, shape, params', [
        ('block1_conv1', (64, 224, 224), 1792),
        ('block1_conv2', (64, 224, 224), 36928),
        ('block1_pool', (64, 112, 112), 0),
        ('block2_conv1', (128, 112, 112), 73856),
        ('block3_conv1', (256, 56, 56), 295168),
        ('block4_conv1', (512, 28, 28), 1180160),
        ('block4_pool', (512, 14, 14), 0),
        ('block5_conv4', (512, 14, 14), 2359808),
        ('block5_pool', (512, 7, 7), 0),
        ('flatten', (25088,), 0),
        ('fc1', (4096,), 102764544),
        ('fc2', (4096,), 16781312),
        ('predictions', (1000,), 4097000)])
    def test_rows(self, name, shape, params):
        rows = {r[0]: r[1:] for r in FULL_SPEC.layer_output_shapes()}
        assert rows[name] == (shape, params)

    def test_total_parameters(self):
        assert FULL_SPEC.parameter_count() == 143667240

    def test_tap_sizes(self):
        for tap, size in FULL_TAP_SIZES.items():
            assert FULL_SPEC.tap_size(tap) == size

    def test_entry_shapes_match_network(self):
        network = VGG19(MICRO_SPEC)
        for name, tensor in network.entries().items():
            assert tuple(tensor.shape) == MICRO_SPEC.entry_shapes()[name]


class TestForward:

    @pytest.fixture(scope='class')
    def bundle(self):
        return make_micro_bundle(seed=3)

    def test_tap_sizes(self, bundle):
        x = torch.randn(3, MICRO_SPEC.input_size, MICRO_SPEC.input_size)
        out = forward_with_taps(bundle, x, list(TapPoint))
        assert list(out) == list(TapPoint)
        for tap, vector in out.items():
            assert tuple(vector.shape) == (MICRO_SPEC.tap_size(tap),)
            assert vector.dtype == torch.float32
            assert bool((vector >= 0).all())

    def test_tap_order_independent_of_request(self, bundle):
        x = torch.randn(3, 64, 64)
        out = forward_with_taps(bundle, x, ['fc1', 'block2_pool'])
        assert list(out) == [TapPoint.BLOCK2_POOL, TapPoint.FC1]

    def test_shallow_taps_skip_classifier(self, bundle):
        network = bundle.network()
        with mock.patch.object(network.classifier['fc1'], 'forward') as fc1:
            network.forward_with_taps(torch.randn(3, 64, 64), [TapPoint.BLOCK2_POOL])
        assert not fc1.called

    def test_batch_matches_single(self, bundle):
        x = torch.randn(3, 3, 64, 64)
        batched = forward_with_taps(bundle, x, [TapPoint.BLOCK4_POOL, TapPoint.FC1])
        for i in range(3):
            single = forward_with_taps(bundle, x[i], [TapPoint.BLOCK4_POOL, TapPoint.FC1])
            for tap in single:
                assert torch.allclose(batched[tap][i], single[tap], rtol=1e-5, atol=1e-6)

    def test_deterministic(self, bundle):
        x = torch.randn(3, 64, 64)
        first = forward_with_taps(bundle, x, [TapPoint.FC1])[TapPoint.FC1]
        second = forward_with_taps(bundle, x, [TapPoint.FC1])[TapPoint.FC1]
        assert torch.equal(first, second)

    def test_single_tap_equals_all_taps(self, bundle):
        x = torch.randn(3, 64, 64)
        every = forward_with_taps(bundle, x, list(TapPoint))
        for tap in TapPoint:
            assert torch.equal(forward_with_taps(bundle, x, [tap])[tap], every[tap])

    def test_zero_weights_give_zero_features(self):
        entries = OrderedDict((name, torch.zeros_like(t)) for name, t in VGG19(MICRO_SPEC).entries().items())
        zero = WeightBundle(entries, {}, MICRO_SPEC)
        out = forward_with_taps(zero, torch.randn(3, 64, 64), [TapPoint.BLOCK1_POOL, TapPoint.FC1])
        assert not out[TapPoint.BLOCK1_POOL].any()
        assert not out[TapPoint.FC1].any()

    def test_wrong_input_size(self, bundle):
        with pytest.raises(ShapeMismatchError, match='64'):
            forward_with_taps(bundle, torch.zeros(3, 32, 32), [TapPoint.FC1])

    def test_empty_taps(self, bundle):
        with pytest.raises(ValueError):
            forward_with_taps(bundle, torch.zeros(3, 64, 64), [])


def test_parse_taps_sorts_and_deduplicates():
    assert parse_taps(['fc1', 'block1_pool', TapPoint.FC1]) == [TapPoint.BLOCK1_POOL, TapPoint.FC1]


def test_forward_matches_oracle_composition():
    torch.manual_seed(11)
    network = VGG19(TINY_SPEC)
    x = torch.randn(3, TINY_SPEC.input_size, TINY_SPEC.input_size)
    out = network.forward_with_taps(x, list(TapPoint))
    a = as_numpy(x)
    for name, layer in network.features.items():
        if name.endswith('_pool'):
            a = oracle_maxpool2d(a)
            np.testing.assert_allclose(as_numpy(out[TapPoint(name)]), a.reshape(-1), rtol=1e-4, atol=1e-5)
        else:
            a = oracle_relu(oracle_conv2d(a, layer.weight, layer.bias))
    fc1 = network.classifier['fc1']
    expected = oracle_relu(oracle_dense(a.reshape(-1), fc1.weight, fc1.bias))
    np.testing.assert_allclose(as_numpy(out[TapPoint.FC1]), expected, rtol=1e-4, atol=1e-5)


class TestBundle:

    def test_roundtrip(self, tmpdir):
        path = str(tmpdir.join('micro.bundle'))
        written = make_micro_bundle(path, seed=5)
        loaded = load_bundle(path)
        in_memory = make_micro_bundle(seed=5)
        assert loaded.spec == MICRO_SPEC
        assert loaded.parameter_count() == MICRO_SPEC.parameter_count()
        assert loaded.digest == written.digest == in_memory.digest
        x = torch.randn(3, 64, 64)
        assert torch.equal(
            forward_with_taps(loaded, x, ['fc1'])[TapPoint.FC1],
            forward_with_taps(in_memory, x, ['fc1'])[TapPoint.FC1])

    def test_layer_parameter_counts(self):
        counts = make_micro_bundle().layer_parameter_counts()
        rows = {r[0]: r[2] for r in MICRO_SPEC.layer_output_shapes()}
        for name, count in counts.items():
            assert count == rows[name]

    def test_seed_changes_digest(self):
        assert make_micro_bundle(seed=0).digest != make_micro_bundle(seed=1).digest

    def test_missing_entry(self, tmpdir):
        entries = VGG19(MICRO_SPEC).entries()
        del entries['fc2.weight']
        path = write_bundle(str(tmpdir.join('b')), entries)
        with pytest.raises(MissingEntryError, match='fc2.weight'):
            load_bundle(path)

    def test_wrong_shape_names_layer(self, tmpdir):
        entries = VGG19(MICRO_SPEC).entries()
        entries['fc2.weight'] = torch.zeros(512, 100)
        path = write_bundle(str(tmpdir.join('b')), entries)
        with pytest.raises(BundleShapeError, match='fc2'):
            load_bundle(path)

    def test_unexpected_entry(self, tmpdir):
        entries = VGG19(MICRO_SPEC).entries()
        entries['extra.weight'] = torch.zeros(2)
        path = write_bundle(str(tmpdir.join('b')), entries)
        with pytest.raises(UnexpectedEntryError, match='extra.weight'):
            load_bundle(path)
