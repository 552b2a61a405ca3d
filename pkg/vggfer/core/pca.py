# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Principal component analysis for wide feature matrices.

When dim > n_samples the top components are recovered from the n x n Gram matrix of the centered
rows (snapshot formulation); otherwise the dim x dim covariance is decomposed directly. Both use the
1/(n - 1) normalization. Columns are streamed in blocks of ``config.BLOCK_COLUMNS`` through float64
accumulators, so only the float32 feature matrix is ever held in full.
"""

import warnings
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Union

import torch
from torch import Tensor

from vggfer import config
from vggfer.enum import PcaSolver, TapPoint
from vggfer.exceptions import (
    ComponentClampWarning, FeatureDimensionError, InsufficientSamplesError, NonFiniteInputError)
from vggfer.io.bundle import read_bundle, write_bundle
from .eigen import symmetric_eigh
from .features import FeatureMatrix

__all__ = ['PcaModel', 'pca_fit', 'pca_transform', 'reconstruct']

GRAM = 'gram'
COVARIANCE = 'covariance'
# Gram eigenvalues below this fraction of the largest one are treated as numerically zero
RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: Tensor
    components: Tensor
    eigenvalues: Tensor
    requested_k: int
    n_samples: int
    total_variance: float
    layer: Optional[TapPoint] = None
    solver: PcaSolver = PcaSolver.EIGH

    @property
    def k(self) -> int:
        return int(self.components.shape[0])

    @property
    def dim(self) -> int:
        return int(self.components.shape[1])

    @property
    def clamped(self) -> bool:
        return self.k < self.requested_k

    @property
    def explained_variance_ratio(self) -> Tensor:
        if self.total_variance <= 0.0:
            return torch.zeros(self.k, dtype=torch.float64)
        return self.eigenvalues.to(torch.float64) / self.total_variance

    def truncate(self, k: int) -> 'PcaModel':
        """Leading min(k, self.k) components, recording k as the requested count."""
        if k < 1:
            raise ValueError("Component count must be positive, got {}".format(k))
        kept = min(k, self.k)
        return replace(
            self, components=self.components[:kept], eigenvalues=self.eigenvalues[:kept], requested_k=k)

    def save(self, path: str) -> str:
        sidecar = {
            'kind': 'pca',
            'requested_k': self.requested_k,
            'n_samples': self.n_samples,
            'total_variance': self.total_variance,
            'layer': None if self.layer is None else self.layer.value,
            'solver': self.solver.value}
        entries = {'mean': self.mean, 'components': self.components, 'eigenvalues': self.eigenvalues}
        return write_bundle(path, entries, source='vggfer pca', sidecar=sidecar)

    @classmethod
    def load(cls, path: str) -> 'PcaModel':
        entries, _, sidecar = read_bundle(path)
        sidecar = sidecar or {}
        layer = sidecar.get('layer')
        return cls(
            mean=entries['mean'],
            components=entries['components'],
            eigenvalues=entries['eigenvalues'],
            requested_k=int(sidecar.get('requested_k', entries['components'].shape[0])),
            n_samples=int(sidecar.get('n_samples', 0)),
            total_variance=float(sidecar.get('total_variance', 0.0)),
            layer=None if layer is None else TapPoint(layer),
            solver=PcaSolver.parse(sidecar.get('solver', 'eigh')))


def _data(features: Union[FeatureMatrix, Tensor]) -> Tensor:
    return features.data if isinstance(features, FeatureMatrix) else features


def _blocks(dim: int, block_columns: int) -> Iterator[slice]:
    for start in range(0, dim, block_columns):
        yield slice(start, min(start + block_columns, dim))


def _canonical_signs(components: Tensor) -> Tensor:
    pivots = components.abs().argmax(dim=1)
    signs = torch.sign(components.gather(1, pivots.unsqueeze(1)))
    signs[signs == 0] = 1.0
    return components * signs


def pca_fit(
        train: Union[FeatureMatrix, Tensor],
        n_components: int,
        solver: Union[PcaSolver, str] = PcaSolver.EIGH,
        method: Optional[str] = None,
        block_columns: Optional[int] = None) -> PcaModel:
    """Fit the top principal components of the training rows.

    Parameters
    ----------
    train : FeatureMatrix or Tensor
        (n_samples, dim) training rows, n_samples >= 2
    n_components : int
        Requested component count; clamped to min(n_samples - 1, dim) and, on the Gram path,
        to the numerical rank, with a ComponentClampWarning
    solver : PcaSolver or str
        Symmetric eigensolver, ``eigh`` (LAPACK) or ``jacobi``
    method : str, optional
        Force ``gram`` or ``covariance``; chosen from the matrix shape when None
    block_columns : int, optional
        Column block width for streaming, defaults to ``config.BLOCK_COLUMNS``

    Returns
    -------
    PcaModel
    """
    solver = PcaSolver.parse(solver)
    layer = train.layer if isinstance(train, FeatureMatrix) else None
    x = _data(train)
    block_columns = block_columns or config.BLOCK_COLUMNS
    if n_components < 1:
        raise ValueError("n_components must be positive, got {}".format(n_components))
    if x.dim() != 2 or x.shape[0] < 2:
        raise InsufficientSamplesError(
            "PCA needs at least 2 samples, got feature matrix of shape {}".format(tuple(x.shape)))
    if not bool(torch.isfinite(x).all()):
        raise NonFiniteInputError("PCA input for {} contains NaN or Inf".format(layer or 'features'))
    n, dim = int(x.shape[0]), int(x.shape[1])
    if method is None:
        method = GRAM if dim > n else COVARIANCE
    k = min(n_components, n - 1, dim)

    mean = torch.zeros(dim, dtype=torch.float64)
    for cols in _blocks(dim, block_columns):
        mean[cols] = x[:, cols].to(torch.float64).mean(dim=0)

    if method == GRAM:
        gram = torch.zeros(n, n, dtype=torch.float64)
        for cols in _blocks(dim, block_columns):
            xc = x[:, cols].to(torch.float64) - mean[cols]
            gram += xc @ xc.t()
        total = float(torch.trace(gram)) / (n - 1)
        values, vectors = symmetric_eigh(gram, solver)
        largest = float(values[0])
        rank = int((values > RANK_RTOL * largest).sum()) if largest > 0.0 else 0
        if rank == 0:
            raise InsufficientSamplesError("PCA input for {} has zero variance".format(layer or 'features'))
        k = min(k, rank)
        u = vectors[:, :k]
        norms = torch.zeros(k, dtype=torch.float64)
        for cols in _blocks(dim, block_columns):
            xc = x[:, cols].to(torch.float64) - mean[cols]
            norms += ((u.t() @ xc) ** 2).sum(dim=1)
        norms = norms.sqrt()
        components = torch.empty(k, dim, dtype=torch.float32)
        for cols in _blocks(dim, block_columns):
            xc = x[:, cols].to(torch.float64) - mean[cols]
            components[:, cols] = ((u.t() @ xc) / norms.unsqueeze(1)).to(torch.float32)
        eigenvalues = values[:k] / (n - 1)
    elif method == COVARIANCE:
        xc = x.to(torch.float64) - mean
        cov = (xc.t() @ xc) / (n - 1)
        total = float(torch.trace(cov))
        values, vectors = symmetric_eigh(cov, solver)
        components = vectors[:, :k].t().to(torch.float32)
        eigenvalues = values[:k]
    else:
        raise ValueError("Unknown PCA method {!r}, expected {!r} or {!r}".format(method, GRAM, COVARIANCE))

    if k < n_components:
        warnings.warn(
            "Requested {} components for {} but kept {} ({} samples, dim {})".format(
                n_components, layer or 'features', k, n, dim),
            ComponentClampWarning)
    return PcaModel(
        mean=mean.to(torch.float32),
        components=_canonical_signs(components).contiguous(),
        eigenvalues=eigenvalues.clamp_min(0.0).to(torch.float32),
        requested_k=n_components,
        n_samples=n,
        total_variance=total,
        layer=layer,
        solver=solver)


def pca_transform(
        model: PcaModel,
        features: Union[FeatureMatrix, Tensor],
        block_columns: Optional[int] = None) -> Tensor:
    """Project rows onto the model's components, returning an (n, k) float64 tensor."""
    x = _data(features)
    if x.dim() == 1:
        x = x.unsqueeze(0)
    if x.dim() != 2 or x.shape[1] != model.dim:
        raise FeatureDimensionError(
            "PCA model expects {} features, got matrix of shape {}".format(model.dim, tuple(x.shape)))
    block_columns = block_columns or config.BLOCK_COLUMNS
    mean = model.mean.to(torch.float64)
    out = torch.zeros(x.shape[0], model.k, dtype=torch.float64)
    for cols in _blocks(model.dim, block_columns):
        xc = x[:, cols].to(torch.float64) - mean[cols]
        out += xc @ model.components[:, cols].to(torch.float64).t()
    return out


def reconstruct(model: PcaModel, projections: Tensor) -> Tensor:
    return projections.to(torch.float64) @ model.components.to(torch.float64) + model.mean.to(torch.float64)
