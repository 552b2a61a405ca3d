# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Procedural stand-in for the licensed expression corpora.

Each class c is an oriented sinusoidal grating (angle c * pi / 7, class-specific frequency)
overlaid with a fixed layout of Gaussian blobs. Samples vary by a small translation, a global
gain and additive noise drawn from a generator seeded by (seed, class, index).
"""

import math
import os
from typing import Tuple

import numpy as np

from vggfer.enum import EXPRESSIONS
from vggfer.exceptions import CorpusError
from vggfer.io.image import encode_pgm
from .corpus import Corpus, load_corpus

__all__ = ['generate_synthetic_corpus', 'synthetic_image']

MAX_SHIFT = 3
GAIN_RANGE = (0.9, 1.1)
NOISE_STD = 10.0
NUM_BLOBS = 3


def _blob_layout(class_index: int) -> np.ndarray:
    rng = np.random.default_rng([class_index, len(EXPRESSIONS)])
    return rng.uniform(0.2, 0.8, size=(NUM_BLOBS, 2))


def synthetic_image(class_index: int, rng: np.random.Generator, size: Tuple[int, int]) -> np.ndarray:
    height, width = size
    dy, dx = rng.integers(-MAX_SHIFT, MAX_SHIFT + 1, size=2)
    gain = rng.uniform(*GAIN_RANGE)
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    v = (yy + dy) / height
    u = (xx + dx) / width
    angle = class_index * math.pi / len(EXPRESSIONS)
    frequency = 3.0 + class_index
    image = 128.0 + 50.0 * np.sin(2.0 * math.pi * frequency * (u * math.cos(angle) + v * math.sin(angle)))
    sigma = 1.0 / 12.0
    for cy, cx in _blob_layout(class_index):
        image += 60.0 * np.exp(-((v - cy) ** 2 + (u - cx) ** 2) / (2.0 * sigma ** 2))
    image = gain * (image - 128.0) + 128.0
    image += rng.normal(0.0, NOISE_STD, size=image.shape)
    return np.clip(np.rint(image), 0, 255).astype(np.uint8)


def generate_synthetic_corpus(
        root: str, seed: int = 42, per_class: int = 30, size: Tuple[int, int] = (256, 256)) -> Corpus:
    """Write ``per_class`` PGM images for each of the seven labels under ``root`` and load them back."""
    if per_class < 1:
        raise ValueError("per_class must be at least 1, got {}".format(per_class))
    if size[0] < 1 or size[1] < 1:
        raise ValueError("Image size must be positive, got {}".format(size))
    try:
        for class_index, label in enumerate(EXPRESSIONS):
            label_dir = os.path.join(root, label)
            os.makedirs(label_dir, exist_ok=True)
            for i in range(per_class):
                rng = np.random.default_rng([seed, class_index, i])
                pixels = synthetic_image(class_index, rng, size)
                encode_pgm(os.path.join(label_dir, '{}_{:03d}.pgm'.format(label, i)), pixels)
    except OSError as e:
        raise CorpusError("Cannot write synthetic corpus under {}: {}".format(root, e))
    return load_corpus(root)
