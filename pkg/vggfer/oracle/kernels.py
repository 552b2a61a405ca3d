"""Textbook loop definitions of the network kernels, accumulated in float64.

Nothing here is optimized or shared with vggfer.function.
"""

import numpy as np

from vggfer.exceptions import OddExtentError, ShapeMismatchError

__all__ = ['oracle_conv2d', 'oracle_maxpool2d', 'oracle_dense', 'oracle_relu']


def _f64(x) -> np.ndarray:
    if hasattr(x, 'detach'):
        x = x.detach().cpu().numpy()
    return np.asarray(x, dtype=np.float64)


def oracle_conv2d(x, weight, bias) -> np.ndarray:
    x, weight, bias = _f64(x), _f64(weight), _f64(bias)
    c_in, height, width = x.shape
    c_out = weight.shape[0]
    if weight.shape != (c_out, c_in, 3, 3):
        raise ShapeMismatchError(
            "oracle_conv2d: input shape {} and weight shape {} disagree".format(x.shape, weight.shape))
    padded = np.zeros((c_in, height + 2, width + 2))
    padded[:, 1:-1, 1:-1] = x
    out = np.empty((c_out, height, width))
    for c in range(c_out):
        for y in range(height):
            for z in range(width):
                out[c, y, z] = bias[c] + np.sum(weight[c] * padded[:, y:y + 3, z:z + 3])
    return out


def oracle_maxpool2d(x) -> np.ndarray:
    x = _f64(x)
    channels, height, width = x.shape
    if height % 2 or width % 2:
        raise OddExtentError("oracle_maxpool2d: odd extent in shape {}".format(x.shape))
    out = np.empty((channels, height // 2, width // 2))
    for c in range(channels):
        for y in range(height // 2):
            for z in range(width // 2):
                out[c, y, z] = max(
                    x[c, 2 * y, 2 * z], x[c, 2 * y, 2 * z + 1], x[c, 2 * y + 1, 2 * z], x[c, 2 * y + 1, 2 * z + 1])
    return out


def oracle_dense(x, weight, bias) -> np.ndarray:
    x, weight, bias = _f64(x), _f64(weight), _f64(bias)
    m, n = weight.shape
    if x.shape != (n,):
        raise ShapeMismatchError("oracle_dense: input shape {} and weight shape {} disagree".format(x.shape, weight.shape))
    out = np.empty(m)
    for j in range(m):
        acc = bias[j]
        for i in range(n):
            acc += weight[j, i] * x[i]
        out[j] = acc
    return out


def oracle_relu(x) -> np.ndarray:
    x = _f64(x)
    return np.where(x > 0.0, x, 0.0)
