from typing import NamedTuple

import numpy as np
import scipy.linalg

from vggfer.exceptions import InsufficientSamplesError, OracleScopeError

__all__ = ['OraclePca', 'oracle_pca', 'MAX_ORACLE_DIM']

MAX_ORACLE_DIM = 256


class OraclePca(NamedTuple):
    mean: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    total_variance: float


def oracle_pca(X, k: int) -> OraclePca:
    """Top-k eigenpairs of the full dim x dim covariance (1 / (n - 1)), largest-magnitude entry of each component positive."""
    if hasattr(X, 'detach'):
        X = X.detach().cpu().numpy()
    X = np.asarray(X, dtype=np.float64)
    n, dim = X.shape
    if dim > MAX_ORACLE_DIM:
        raise OracleScopeError("oracle_pca handles at most {} dimensions, got {}".format(MAX_ORACLE_DIM, dim))
    if n < 2:
        raise InsufficientSamplesError("oracle_pca needs at least 2 samples")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    values, vectors = scipy.linalg.eigh(cov)
    values, vectors = values[::-1], vectors[:, ::-1]
    components = vectors[:, :k].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return OraclePca(mean, components, np.maximum(values[:k], 0.0), float(np.trace(cov)))
