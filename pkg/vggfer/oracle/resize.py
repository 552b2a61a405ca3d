import math

import numpy as np

__all__ = ['oracle_resize_bilinear']


def oracle_resize_bilinear(pixels, out_height: int, out_width: int) -> np.ndarray:
    """Bilinear resampling with half-pixel centers: source = (dest + 0.5) * in / out - 0.5, clamped at 0."""
    pixels = np.asarray(pixels, dtype=np.float64)
    in_height, in_width = pixels.shape
    out = np.empty((out_height, out_width))
    for oy in range(out_height):
        sy = max((oy + 0.5) * in_height / out_height - 0.5, 0.0)
        y0 = min(int(math.floor(sy)), in_height - 1)
        y1 = min(y0 + 1, in_height - 1)
        ly = sy - y0
        for ox in range(out_width):
            sx = max((ox + 0.5) * in_width / out_width - 0.5, 0.0)
            x0 = min(int(math.floor(sx)), in_width - 1)
            x1 = min(x0 + 1, in_width - 1)
            lx = sx - x0
            top = (1.0 - lx) * pixels[y0, x0] + lx * pixels[y0, x1]
            bottom = (1.0 - lx) * pixels[y1, x0] + lx * pixels[y1, x1]
            out[oy, ox] = (1.0 - ly) * top + ly * bottom
    return out
