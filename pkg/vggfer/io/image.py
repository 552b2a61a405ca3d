"""8-bit grayscale image containers: PGM (P5) and PNG."""

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from vggfer.exceptions import ImageDecodeError

IMAGE_EXTENSIONS = ('.pgm', '.png')
_FORMATS = {'PPM', 'PNG'}


def is_image_file(path: str) -> bool:
    return os.path.splitext(path)[1].lower() in IMAGE_EXTENSIONS


def decode_image(path: str) -> np.ndarray:
    """Decode an 8-bit grayscale image into an (H, W) uint8 array."""
    try:
        with Image.open(path) as img:
            if img.format not in _FORMATS:
                raise ImageDecodeError("{}: unsupported container {}".format(path, img.format))
            if img.mode != 'L':
                raise ImageDecodeError(
                    "{}: expected 8-bit grayscale, got mode {}".format(path, img.mode))
            pixels = np.array(img, dtype=np.uint8)
    except (OSError, UnidentifiedImageError, SyntaxError) as e:
        raise ImageDecodeError("{}: cannot decode image ({})".format(path, e))
    return pixels


def encode_pgm(path: str, pixels: np.ndarray) -> str:
    """Write an (H, W) uint8 array as binary PGM."""
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    if pixels.ndim != 2:
        raise ValueError("Expected an (H, W) pixel grid, got shape {}".format(pixels.shape))
    Image.fromarray(pixels).save(path, format='PPM')
    return path
