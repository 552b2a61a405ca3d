from dataclasses import dataclass
from typing import List, Optional, Sequence

import torch
from torch import Tensor

from vggfer.enum import TapPoint
from vggfer.exceptions import FeatureDimensionError, InsufficientSamplesError

__all__ = ['FeatureMatrix']


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Rows of tapped activations, one per sample, in the order of ``sample_ids``."""
    data: Tensor
    layer: TapPoint
    sample_ids: List[str]
    labels: Optional[List[str]] = None

    def __post_init__(self):
        if self.data.dim() != 2:
            raise FeatureDimensionError(
                "Feature matrix for {} must be 2-D, got shape {}".format(self.layer, tuple(self.data.shape)))
        if self.data.shape[0] < 1:
            raise InsufficientSamplesError("Feature matrix for {} has no rows".format(self.layer))
        if len(self.sample_ids) != self.data.shape[0]:
            raise FeatureDimensionError(
                "{} sample ids for {} feature rows".format(len(self.sample_ids), self.data.shape[0]))
        if self.labels is not None and len(self.labels) != self.data.shape[0]:
            raise FeatureDimensionError(
                "{} labels for {} feature rows".format(len(self.labels), self.data.shape[0]))

    @property
    def n_samples(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    def rows(self, indices: Sequence[int]) -> 'FeatureMatrix':
        index = torch.as_tensor(list(indices), dtype=torch.long)
        return FeatureMatrix(
            data=self.data.index_select(0, index),
            layer=self.layer,
            sample_ids=[self.sample_ids[i] for i in indices],
            labels=None if self.labels is None else [self.labels[i] for i in indices])
