# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Convert torchvision's ImageNet VGG19 into a vggfer weight bundle.

torchvision numbers layers by position (``features.0``, ..., ``classifier.6``); they are renamed to
``block<b>_conv<c>``, ``fc1``, ``fc2`` and ``predictions`` in network order. torchvision flattens the
block5 map in (C, H, W) order like vggfer, so fc1 is copied without permutation.

torchvision's network expects RGB input normalized as ``(x - mean) / std``, while vggfer feeds BGR
input centered by the configured means with no scaling. The channel reversal and the ``1 / std`` scale
are folded into the ``block1_conv1`` weight, and the difference between the two sets of means into its
bias. With the default means that difference is zero and the converted bundle reproduces torchvision
exactly, border pixels included; with other means the bias correction ignores zero padding, so outputs
within one pixel of the image border differ.
"""

import argparse
import sys
from collections import OrderedDict
from typing import Dict, Sequence

import torch
from torch import Tensor

from vggfer.data.preprocess import DEFAULT_MEANS
from vggfer.exceptions import BundleShapeError
from vggfer.nn.vgg import FULL_SPEC, WeightBundle, load_bundle
from vggfer.io.bundle import write_bundle

SOURCE = 'torchvision vgg19 IMAGENET1K_V1'
# torchvision's ImageNet normalization, RGB order
IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)
FIRST_CONV = 'block1_conv1'

parser = argparse.ArgumentParser(description='Convert torchvision VGG19 weights to a vggfer bundle')
parser.add_argument('--out', required=True, help='Bundle directory to write')
parser.add_argument('--state-dict', default=None, help='Local torchvision vgg19 state dict instead of downloading')


def _indexed(state_dict: Dict[str, Tensor], prefix: str):
    indices = sorted(set(int(k.split('.')[1]) for k in state_dict if k.startswith(prefix + '.')))
    return ['{}.{}'.format(prefix, i) for i in indices]


def rename_state_dict(state_dict: Dict[str, Tensor]) -> 'OrderedDict[str, Tensor]':
    targets = [name for name, _, _ in FULL_SPEC.conv_layers()] + [name for name, _, _ in FULL_SPEC.dense_layers()]
    sources = _indexed(state_dict, 'features') + _indexed(state_dict, 'classifier')
    if len(sources) != len(targets):
        raise BundleShapeError("Expected {} parameterized layers in a VGG19 state dict, found {}: {}".format(
            len(targets), len(sources), sources))
    entries = OrderedDict()
    for source, target in zip(sources, targets):
        for param in ('weight', 'bias'):
            entries['{}.{}'.format(target, param)] = state_dict['{}.{}'.format(source, param)].detach().float()
    return entries


def fold_input_normalization(
        entries: 'OrderedDict[str, Tensor]', means: Sequence[float] = DEFAULT_MEANS) -> 'OrderedDict[str, Tensor]':
    """Rewrite block1_conv1 so it accepts BGR input centered by `means` instead of normalized RGB."""
    weight = entries[FIRST_CONV + '.weight'].double()
    bias = entries[FIRST_CONV + '.bias'].double()
    if weight.dim() != 4 or weight.shape[1] != 3:
        raise BundleShapeError("Layer {}: expected a 3-channel input kernel, got shape {}".format(
            FIRST_CONV, tuple(weight.shape)))
    inv_std = 1.0 / torch.tensor(IMAGENET_STD, dtype=torch.float64).flip(0).view(1, 3, 1, 1)
    folded = weight.flip(1) * inv_std
    # vggfer channel c carries RGB channel 2 - c shifted by means[c] - IMAGENET_MEAN[2 - c]
    offset = torch.tensor(means, dtype=torch.float64) - torch.tensor(IMAGENET_MEAN, dtype=torch.float64).flip(0)
    bias = bias + (folded * offset.view(1, 3, 1, 1)).sum(dim=(1, 2, 3))
    out = OrderedDict(entries)
    out[FIRST_CONV + '.weight'] = folded.float()
    out[FIRST_CONV + '.bias'] = bias.float()
    return out


def download_state_dict() -> Dict[str, Tensor]:
    from torchvision.models import vgg19
    try:
        model = vgg19(weights='IMAGENET1K_V1')
    except TypeError:
        model = vgg19(pretrained=True)
    return model.state_dict()


def convert(
        out: str, state_dict: Dict[str, Tensor], means: Sequence[float] = DEFAULT_MEANS) -> WeightBundle:
    write_bundle(out, fold_input_normalization(rename_state_dict(state_dict), means), source=SOURCE)
    return load_bundle(out)


def main():
    args = parser.parse_args()
    if args.state_dict is not None:
        state_dict = torch.load(args.state_dict, map_location='cpu')
    else:
        state_dict = download_state_dict()
    bundle = convert(args.out, state_dict)
    print('Wrote {} ({} parameters, digest {})'.format(args.out, bundle.parameter_count(), bundle.digest))
    return 0


if __name__ == '__main__':
    sys.exit(main())
