# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import os
from collections import OrderedDict
from typing import Iterable, Optional, Sequence, Union

import torch
from tqdm import tqdm

from vggfer.core.features import FeatureMatrix
from vggfer.enum import TapPoint
from vggfer.exceptions import FeatureDimensionError
from vggfer.io.bundle import read_bundle, write_bundle
from vggfer.nn.vgg import WeightBundle, parse_taps
from .corpus import Corpus
from .preprocess import DEFAULT_MEANS, preprocess_batch, preprocess_digest

__all__ = ['FeatureCache', 'FeatureSet', 'extract_features']

FEATURES_ENTRY = 'features'


class FeatureCache(object):
    """Feature matrices keyed by corpus content hash, weight-bundle digest, preprocessing digest and layer.

    Layout: ``<root>/<corpus-hash>/<weights-hash>/<preprocess-hash>/<layer>.bundle``. The sidecar repeats
    the three hashes; an entry whose sidecar disagrees with the requested key is a miss.
    """

    def __init__(self, root: str):
        self.root = root

    def path(self, corpus_hash: str, weights_hash: str, preprocess_hash: str, layer: TapPoint) -> str:
        return os.path.join(
            self.root, corpus_hash, weights_hash, preprocess_hash, '{}.bundle'.format(layer.value))

    def load(
            self,
            corpus_hash: str,
            weights_hash: str,
            preprocess_hash: str,
            layer: TapPoint) -> Optional[FeatureMatrix]:
        path = self.path(corpus_hash, weights_hash, preprocess_hash, layer)
        if not os.path.isdir(path):
            return None
        entries, _, sidecar = read_bundle(path)
        if (sidecar is None or sidecar.get('corpus_hash') != corpus_hash
                or sidecar.get('weights_hash') != weights_hash
                or sidecar.get('preprocess_hash') != preprocess_hash
                or sidecar.get('layer') != layer.value):
            return None
        return FeatureMatrix(
            data=entries[FEATURES_ENTRY],
            layer=layer,
            sample_ids=list(sidecar['sample_ids']),
            labels=sidecar.get('labels'))

    def store(self, features: FeatureMatrix, corpus_hash: str, weights_hash: str, preprocess_hash: str) -> str:
        sidecar = {
            'corpus_hash': corpus_hash,
            'weights_hash': weights_hash,
            'preprocess_hash': preprocess_hash,
            'layer': features.layer.value,
            'sample_ids': list(features.sample_ids),
            'labels': features.labels}
        return write_bundle(
            self.path(corpus_hash, weights_hash, preprocess_hash, features.layer),
            {FEATURES_ENTRY: features.data},
            source='vggfer feature cache',
            sidecar=sidecar)


class FeatureSet(OrderedDict):
    """TapPoint -> FeatureMatrix, remembering which layers were served from the cache."""

    def __init__(self, *args, **kwargs):
        super(FeatureSet, self).__init__(*args, **kwargs)
        self.cache_hits = []


def extract_features(
        corpus: Corpus,
        bundle: WeightBundle,
        taps: Iterable[Union[TapPoint, str]],
        cache: Optional[FeatureCache] = None,
        batch_size: int = 16,
        means: Sequence[float] = DEFAULT_MEANS,
        progress: bool = False) -> FeatureSet:
    """Preprocess every corpus sample, run it through the network and collect the tapped rows.

    Layers already present in ``cache`` for the same corpus, weights and preprocessing (input size
    and means) are loaded instead of recomputed; freshly computed layers are written back.
    """
    taps = parse_taps(taps)
    preprocess_hash = preprocess_digest(bundle.spec.input_size, means)
    result = FeatureSet()
    missing = []
    for tap in taps:
        cached = None
        if cache is not None:
            cached = cache.load(corpus.content_hash, bundle.digest, preprocess_hash, tap)
        if cached is not None:
            result[tap] = cached
            result.cache_hits.append(tap)
        else:
            missing.append(tap)
    if missing:
        network = bundle.network()
        rows = {tap: [] for tap in missing}
        starts = range(0, len(corpus.samples), batch_size)
        for start in tqdm(starts, desc='Extracting {}'.format(', '.join(t.value for t in missing)),
                          disable=not progress):
            batch = preprocess_batch(corpus.samples[start:start + batch_size], bundle.spec.input_size, means)
            outputs = network.forward_with_taps(batch, missing)
            for tap in missing:
                rows[tap].append(outputs[tap])
        for tap in missing:
            data = torch.cat(rows[tap], dim=0)
            expected = bundle.spec.tap_size(tap)
            if data.shape[1] != expected:
                raise FeatureDimensionError(
                    "Layer {} produced {} features, expected {}".format(tap, data.shape[1], expected))
            features = FeatureMatrix(data=data, layer=tap, sample_ids=corpus.ids, labels=corpus.labels)
            if cache is not None:
                cache.store(features, corpus.content_hash, bundle.digest, preprocess_hash)
            result[tap] = features
    return _reorder(result, taps)


def _reorder(result: FeatureSet, taps) -> FeatureSet:
    ordered = FeatureSet((tap, result[tap]) for tap in taps)
    ordered.cache_hits = result.cache_hits
    return ordered
