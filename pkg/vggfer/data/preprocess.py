# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import torch
from torch import Tensor
from torch.nn import functional as F

from vggfer.enum import EXPRESSIONS
from vggfer.exceptions import EmptyImageError, InvalidPixelsError

__all__ = [
    'ImageSample', 'DEFAULT_MEANS', 'resize_intensities', 'preprocess', 'preprocess_batch', 'preprocess_digest']

# ImageNet channel means on the [0, 1] scale, in the channel order of the converted weights
DEFAULT_MEANS = (0.406, 0.456, 0.485)
DEFAULT_INPUT_SIZE = 224
RESIZE_METHOD = 'bilinear-half-pixel'


def _as_uint8(sample_id: str, pixels) -> np.ndarray:
    pixels = np.asarray(pixels)
    if pixels.dtype == np.uint8:
        return pixels
    if not (np.issubdtype(pixels.dtype, np.integer) or np.issubdtype(pixels.dtype, np.floating)
            or pixels.dtype == np.bool_):
        raise InvalidPixelsError("Sample {}: pixels of dtype {} are not intensities".format(sample_id, pixels.dtype))
    if pixels.size:
        values = pixels.astype(np.float64)
        if not np.isfinite(values).all():
            raise InvalidPixelsError("Sample {}: pixels contain non-finite values".format(sample_id))
        low, high = float(values.min()), float(values.max())
        if low < 0.0 or high > 255.0:
            raise InvalidPixelsError(
                "Sample {}: pixel range [{:g}, {:g}] exceeds the 8-bit range [0, 255]".format(sample_id, low, high))
        if not np.array_equal(values, np.round(values)):
            raise InvalidPixelsError("Sample {}: pixels of dtype {} are not whole 8-bit levels".format(
                sample_id, pixels.dtype))
    return pixels.astype(np.uint8)


@dataclass(frozen=True, eq=False)
class ImageSample:
    """An 8-bit grayscale grid. Integer or float grids holding whole levels in [0, 255] are cast to uint8."""
    id: str
    pixels: np.ndarray = field(repr=False)
    label: Optional[str] = None

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 2:
            raise EmptyImageError(
                "Sample {}: expected an (H, W) pixel grid, got shape {}".format(self.id, pixels.shape))
        object.__setattr__(self, 'pixels', _as_uint8(self.id, pixels))
        if self.label is not None and self.label not in EXPRESSIONS:
            raise ValueError("Sample {}: label {!r} is not one of {}".format(self.id, self.label, EXPRESSIONS))

    @property
    def source_size(self) -> Tuple[int, int]:
        return int(self.pixels.shape[0]), int(self.pixels.shape[1])


def resize_intensities(x: Tensor, size: int) -> Tensor:
    """Bilinear resize of an (H, W) grid to (size, size) with half-pixel centers, in float64."""
    x = x.to(torch.float64)
    if tuple(x.shape) == (size, size):
        return x
    return F.interpolate(x[None, None], size=(size, size), mode='bilinear', align_corners=False)[0, 0]


def preprocess(
        sample: ImageSample,
        size: int = DEFAULT_INPUT_SIZE,
        means: Sequence[float] = DEFAULT_MEANS) -> Tensor:
    """Map a grayscale sample to a centered (3, size, size) float32 network input.

    Intensities are scaled to [0, 1], resized directly (no cropping), replicated into
    three channels and centered by subtracting the per-channel means.
    """
    height, width = sample.source_size
    if height < 1 or width < 1:
        raise EmptyImageError("Sample {} has empty pixel grid of size {}".format(sample.id, (height, width)))
    x = torch.from_numpy(np.asarray(sample.pixels, dtype=np.float64)) / 255.0
    x = resize_intensities(x, size)
    x = x.unsqueeze(0).expand(3, size, size)
    x = x - torch.tensor(means, dtype=torch.float64).view(3, 1, 1)
    return x.to(torch.float32).contiguous()


def preprocess_batch(
        samples: Sequence[ImageSample],
        size: int = DEFAULT_INPUT_SIZE,
        means: Sequence[float] = DEFAULT_MEANS) -> Tensor:
    return torch.stack([preprocess(s, size, means) for s in samples])


def preprocess_digest(size: int = DEFAULT_INPUT_SIZE, means: Sequence[float] = DEFAULT_MEANS) -> str:
    """Digest of every preprocessing choice that changes the network input."""
    key = json.dumps(
        {'input_size': int(size), 'means': [float(m) for m in means], 'resize': RESIZE_METHOD}, sort_keys=True)
    return hashlib.sha256(key.encode('utf-8')).hexdigest()
