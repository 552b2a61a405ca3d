# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors
#
# Layer list and weight initialization follow the torchvision VGG implementation
# https://github.com/pytorch/vision/blob/master/torchvision/models/vgg.py

"""VGG19 graph with activation taps, loaded from a portable weight bundle."""

import math
from collections import OrderedDict
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple, Union

import torch
import torch.nn as nn
from torch import Tensor

from vggfer.enum import TapPoint
from vggfer.exceptions import (
    BundleShapeError, MissingEntryError, ShapeMismatchError, UnexpectedEntryError)
from vggfer.function.ops import flatten
from vggfer.io.bundle import read_bundle, tensor_digest, write_bundle
from .layers import TapConv2d, TapDense, TapMaxPool2d

__all__ = [
    'cfgs', 'VggSpec', 'VGG19', 'WeightBundle', 'FULL_SPEC', 'MICRO_SPEC',
    'load_bundle', 'save_bundle', 'forward_with_taps', 'make_micro_bundle', 'parse_taps']

cfgs = {
    'E': [64, 64, 'M', 128, 128, 'M', 256, 256, 256, 256, 'M', 512, 512, 512, 512, 'M', 512, 512, 512, 512, 'M'],
}

DENSE_LAYERS = ('fc1', 'fc2', 'predictions')
NUM_POOLS = 5


class VggSpec(NamedTuple):
    """Geometry of a VGG19 instance. The full network is VggSpec(); the micro network divides every width by 8."""
    width_divisor: int = 1
    input_size: int = 224
    fc_width: int = 4096
    num_classes: int = 1000

    def validate(self):
        if self.width_divisor < 1 or 64 % self.width_divisor:
            raise ValueError("width_divisor must divide 64, got {}".format(self.width_divisor))
        if self.input_size < 2 ** NUM_POOLS or self.input_size % 2 ** NUM_POOLS:
            raise ValueError("input_size must be a positive multiple of 32, got {}".format(self.input_size))
        return self

    def conv_layers(self) -> List[Tuple[str, int, int]]:
        layers = []
        in_channels, block, conv = 3, 1, 0
        for v in cfgs['E']:
            if v == 'M':
                block, conv = block + 1, 0
            else:
                conv += 1
                out_channels = v // self.width_divisor
                layers.append(('block{}_conv{}'.format(block, conv), in_channels, out_channels))
                in_channels = out_channels
        return layers

    @property
    def last_channels(self) -> int:
        return cfgs['E'][-2] // self.width_divisor

    @property
    def flat_features(self) -> int:
        side = self.input_size // 2 ** NUM_POOLS
        return self.last_channels * side * side

    def dense_layers(self) -> List[Tuple[str, int, int]]:
        return [
            ('fc1', self.flat_features, self.fc_width),
            ('fc2', self.fc_width, self.fc_width),
            ('predictions', self.fc_width, self.num_classes)]

    def entry_shapes(self) -> 'OrderedDict[str, Tuple[int, ...]]':
        shapes = OrderedDict()
        for name, c_in, c_out in self.conv_layers():
            shapes[name + '.weight'] = (c_out, c_in, 3, 3)
            shapes[name + '.bias'] = (c_out,)
        for name, n_in, n_out in self.dense_layers():
            shapes[name + '.weight'] = (n_out, n_in)
            shapes[name + '.bias'] = (n_out,)
        return shapes

    def layer_output_shapes(self) -> List[Tuple[str, Tuple[int, ...], int]]:
        """(layer name, output shape in (C, H, W) order, parameter count) for every layer after the input."""
        rows = []
        side, channels = self.input_size, 3
        conv_iter = iter(self.conv_layers())
        block = 1
        for v in cfgs['E']:
            if v == 'M':
                side //= 2
                rows.append(('block{}_pool'.format(block), (channels, side, side), 0))
                block += 1
            else:
                name, c_in, c_out = next(conv_iter)
                channels = c_out
                rows.append((name, (channels, side, side), c_out * c_in * 9 + c_out))
        rows.append(('flatten', (channels * side * side,), 0))
        for name, n_in, n_out in self.dense_layers():
            rows.append((name, (n_out,), n_out * n_in + n_out))
        return rows

    def tap_size(self, tap: Union[TapPoint, str]) -> int:
        tap = TapPoint(tap)
        if tap == TapPoint.FC1:
            return self.fc_width
        return dict((n, _prod(s)) for n, s, _ in self.layer_output_shapes())[tap.value]

    def parameter_count(self) -> int:
        return sum(p for _, _, p in self.layer_output_shapes())


def _prod(shape) -> int:
    out = 1
    for d in shape:
        out *= int(d)
    return out


FULL_SPEC = VggSpec()
MICRO_SPEC = VggSpec(width_divisor=8, input_size=64, fc_width=512, num_classes=125)


def parse_taps(taps: Iterable[Union[TapPoint, str]]) -> List[TapPoint]:
    """Distinct taps, shallowest first."""
    parsed = set(TapPoint.parse(t) if isinstance(t, str) else TapPoint(t) for t in taps)
    if not parsed:
        raise ValueError("At least one tap point is required")
    return sorted(parsed, key=lambda t: t.depth)


def make_layers(cfg, width_divisor):
    layers = OrderedDict()
    in_channels, block, conv = 3, 1, 0
    for v in cfg:
        if v == 'M':
            layers['block{}_pool'.format(block)] = TapMaxPool2d()
            block, conv = block + 1, 0
        else:
            conv += 1
            out_channels = v // width_divisor
            layers['block{}_conv{}'.format(block, conv)] = TapConv2d(in_channels, out_channels)
            in_channels = out_channels
    return nn.ModuleDict(layers)


class VGG19(nn.Module):

    def __init__(self, spec: VggSpec = FULL_SPEC, init_weights: bool = True):
        super(VGG19, self).__init__()
        self.spec = spec.validate()
        self.features = make_layers(cfgs['E'], spec.width_divisor)
        fc1, fc2, predictions = spec.dense_layers()
        self.classifier = nn.ModuleDict(OrderedDict([
            ('fc1', TapDense(fc1[1], fc1[2])),
            ('fc2', TapDense(fc2[1], fc2[2])),
            ('predictions', TapDense(predictions[1], predictions[2], activation=False))]))
        if init_weights:
            self._initialize_weights()

    def _initialize_weights(self):
        for m in self.modules():
            if isinstance(m, nn.Conv2d):
                nn.init.kaiming_normal_(m.weight, mode='fan_out', nonlinearity='relu')
                nn.init.constant_(m.bias, 0)
            elif isinstance(m, nn.Linear):
                nn.init.normal_(m.weight, 0, 0.01)
                nn.init.constant_(m.bias, 0)

    def layer(self, name: str) -> nn.Module:
        if name in self.features:
            return self.features[name]
        return self.classifier[name]

    def entries(self) -> 'OrderedDict[str, Tensor]':
        out = OrderedDict()
        for name in self.spec.entry_shapes():
            layer_name, param = name.rsplit('.', 1)
            out[name] = getattr(self.layer(layer_name), param).detach().clone()
        return out

    @torch.no_grad()
    def load_entries(self, entries: Dict[str, Tensor]):
        for name, shape in self.spec.entry_shapes().items():
            layer_name, param = name.rsplit('.', 1)
            getattr(self.layer(layer_name), param).copy_(entries[name].reshape(shape))
        return self

    @torch.no_grad()
    def forward_with_taps(
            self, x: Tensor, taps: Iterable[Union[TapPoint, str]]) -> 'OrderedDict[TapPoint, Tensor]':
        """Flattened post-activation outputs at the requested taps.

        Parameters
        ----------
        x : Tensor
            Preprocessed image of shape (3, S, S) or batch of shape (N, 3, S, S), S = spec.input_size
        taps : iterable of TapPoint or str
            Non-empty set of tap points

        Returns
        -------
        OrderedDict
            TapPoint -> feature vector (or (N, dim) matrix for a batch), shallowest tap first
        """
        taps = parse_taps(taps)
        size = self.spec.input_size
        if x.dim() not in (3, 4) or tuple(x.shape[-3:]) != (3, size, size):
            raise ShapeMismatchError(
                "forward_with_taps: expected input shape (3, {s}, {s}) or (N, 3, {s}, {s}), got {}".format(
                    tuple(x.shape), s=size))
        deepest = taps[-1]
        out = OrderedDict()
        for name, layer in self.features.items():
            x = layer(x)
            if isinstance(layer, TapMaxPool2d):
                tap = TapPoint(name)
                if tap in taps:
                    out[tap] = flatten(x)
                if tap == deepest:
                    return out
        out[TapPoint.FC1] = self.classifier['fc1'](flatten(x))
        return out

    def forward(self, x: Tensor) -> Tensor:
        return self.forward_with_taps(x, [TapPoint.FC1])[TapPoint.FC1]


class WeightBundle(object):
    """Validated VGG19 parameters. Immutable once loaded; the network built from them is shared."""

    def __init__(self, entries: 'OrderedDict[str, Tensor]', metadata: dict, spec: VggSpec):
        self.entries = entries
        self.metadata = metadata
        self.spec = spec
        self._digest = None
        self._network = None

    @property
    def source(self) -> str:
        return self.metadata.get('source', '')

    @property
    def digest(self) -> str:
        if self._digest is None:
            self._digest = tensor_digest(self.entries)
        return self._digest

    def parameter_count(self) -> int:
        return sum(t.numel() for t in self.entries.values())

    def layer_parameter_counts(self) -> 'OrderedDict[str, int]':
        counts = OrderedDict()
        for name, tensor in self.entries.items():
            layer_name = name.rsplit('.', 1)[0]
            counts[layer_name] = counts.get(layer_name, 0) + tensor.numel()
        return counts

    def network(self) -> VGG19:
        if self._network is None:
            self._network = VGG19(self.spec, init_weights=False).load_entries(self.entries).eval()
        return self._network


def _infer_spec(entries: Dict[str, Tensor], path: str) -> VggSpec:
    for required in ('block1_conv1.weight', 'fc1.weight', 'predictions.weight'):
        if required not in entries:
            raise MissingEntryError("Bundle {} has no entry {}".format(path, required))
    first = entries['block1_conv1.weight']
    if first.dim() != 4 or first.shape[0] < 1 or 64 % first.shape[0]:
        raise BundleShapeError(
            "Layer block1_conv1: weight shape {} is not a (C_out, 3, 3, 3) kernel with C_out dividing 64".format(
                tuple(first.shape)))
    width_divisor = 64 // first.shape[0]
    last_channels = cfgs['E'][-2] // width_divisor
    fc1 = entries['fc1.weight']
    if fc1.dim() != 2 or fc1.shape[1] % last_channels:
        raise BundleShapeError(
            "Layer fc1: weight shape {} is incompatible with {} block5 channels".format(
                tuple(fc1.shape), last_channels))
    cells = fc1.shape[1] // last_channels
    side = int(round(math.sqrt(cells)))
    if side * side != cells:
        raise BundleShapeError(
            "Layer fc1: {} input features do not form a square {}-channel map".format(fc1.shape[1], last_channels))
    predictions = entries['predictions.weight']
    if predictions.dim() != 2:
        raise BundleShapeError("Layer predictions: weight shape {} is not 2-D".format(tuple(predictions.shape)))
    return VggSpec(
        width_divisor=width_divisor,
        input_size=side * 2 ** NUM_POOLS,
        fc_width=fc1.shape[0],
        num_classes=predictions.shape[0])


def validate_entries(entries: Dict[str, Tensor], spec: VggSpec, path: str = '<memory>'):
    expected = spec.entry_shapes()
    for name, shape in expected.items():
        if name not in entries:
            raise MissingEntryError("Bundle {} has no entry {}".format(path, name))
        actual = tuple(entries[name].shape)
        if actual != shape:
            layer_name, param = name.rsplit('.', 1)
            raise BundleShapeError(
                "Layer {}: {} shape {} does not match expected {}".format(layer_name, param, actual, shape))
    unexpected = sorted(set(entries) - set(expected))
    if unexpected:
        raise UnexpectedEntryError("Bundle {} has unexpected entries {}".format(path, unexpected))


def load_bundle(path: str) -> WeightBundle:
    """Load and shape-validate a VGG19 weight bundle, inferring its width and input size."""
    entries, metadata, _ = read_bundle(path)
    spec = _infer_spec(entries, path)
    try:
        spec.validate()
    except ValueError as e:
        raise BundleShapeError("Bundle {} describes an unsupported geometry: {}".format(path, e))
    validate_entries(entries, spec, path)
    ordered = OrderedDict((name, entries[name]) for name in spec.entry_shapes())
    return WeightBundle(ordered, metadata, spec)


def save_bundle(path: str, network: VGG19, source: str = '') -> str:
    return write_bundle(path, network.entries(), source=source)


def forward_with_taps(
        bundle: WeightBundle,
        image: Tensor,
        taps: Iterable[Union[TapPoint, str]]) -> 'OrderedDict[TapPoint, Tensor]':
    return bundle.network().forward_with_taps(image, taps)


def make_micro_bundle(
        path: Optional[str] = None, seed: int = 0, spec: VggSpec = MICRO_SPEC) -> WeightBundle:
    """Seeded random VGG19 at reduced width, written to `path` when given."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        network = VGG19(spec)
    source = 'vgg19 random init, width/{} input {} seed {}'.format(spec.width_divisor, spec.input_size, seed)
    if path is not None:
        save_bundle(path, network, source=source)
        return load_bundle(path)
    return WeightBundle(network.entries(), {'version': 1, 'source': source}, spec)
