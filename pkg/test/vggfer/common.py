# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import hypothesis.strategies as st
import numpy as np
import torch

from vggfer.core.features import FeatureMatrix
from vggfer.enum import EXPRESSIONS, TapPoint
from vggfer.nn.vgg import VggSpec

# Set Constants
KERNEL_RTOL = 1e-5
KERNEL_ATOL = 1e-6
PCA_ATOL = 1e-6

# Small enough for the loop oracles to run the whole network: 2..16 channels, 32x32 input, 1x1 block5 map
TINY_SPEC = VggSpec(width_divisor=32, input_size=32, fc_width=16, num_classes=10)

seed_st = st.integers(min_value=0, max_value=2 ** 31 - 1)
even_extent_st = st.integers(min_value=1, max_value=4).map(lambda v: 2 * v)
channels_st = st.integers(min_value=1, max_value=4)


def blob_features(
        n_per_class,
        dim,
        classes=EXPRESSIONS,
        separation=6.0,
        seed=0,
        layer=TapPoint.BLOCK4_POOL):
    """Gaussian blobs around random class centers, rows grouped by class like a loaded corpus."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(0.0, separation, size=(len(classes), dim))
    rows, labels, ids = [], [], []
    for c, label in enumerate(classes):
        for i in range(n_per_class):
            rows.append(centers[c] + rng.normal(0.0, 1.0, size=dim))
            labels.append(label)
            ids.append('{}/{}_{:03d}'.format(label, label, i))
    data = torch.from_numpy(np.stack(rows).astype(np.float32))
    return FeatureMatrix(data=data, layer=layer, sample_ids=ids, labels=labels)


def as_numpy(t):
    return t.detach().cpu().numpy().astype(np.float64)


def decaying_spectrum(seed, n, dim, decay=0.5, offset=1.0):
    """float32 rows whose covariance eigenvalues fall off geometrically, so eigenvectors are well separated."""
    rng = np.random.default_rng(seed)
    rank = min(n - 1, dim)
    latent = rng.standard_normal((n, rank)) * decay ** np.arange(rank)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    x = latent @ basis[:, :rank].T + offset * rng.standard_normal(dim)
    return torch.from_numpy(x.astype(np.float32))


# Published per-layer accuracies, block1_pool .. fc1
CKPLUS_A_JK = (0.8869, 0.9048, 0.9345, 0.9226, 0.9048, 0.8988)
CKPLUS_A_TEST = (0.8571, 0.8571, 0.9048, 0.9286, 0.9048, 0.9286)
JAFFE_A_JK = (0.7952, 0.8373, 0.8976, 0.9277, 0.8253, 0.7651)
JAFFE_A_TEST = (0.8810, 0.8810, 0.9286, 0.9286, 0.8571, 0.8810)


def table_results(a_jk, a_test, n_pca):
    """EvalResult per tap point carrying the given jackknife and holdout accuracies."""
    from vggfer.enum import Scheme
    from vggfer.evalkit import EvalResult, SchemeResult

    def scheme_result(layer, scheme, accuracy):
        confusion = np.zeros((len(EXPRESSIONS), len(EXPRESSIONS)), dtype=np.int64)
        return SchemeResult(
            layer=layer, n_pca=n_pca, scheme=scheme, accuracy=accuracy, correct=0, total=0,
            fold_accuracies=[accuracy], confusion=confusion, classes=EXPRESSIONS, effective_k=[n_pca])

    results = []
    for layer, jk, test in zip(TapPoint, a_jk, a_test):
        result = EvalResult(layer=layer, n_pca=n_pca)
        result.schemes[Scheme.JACKKNIFE] = scheme_result(layer, Scheme.JACKKNIFE, jk)
        result.schemes[Scheme.HOLDOUT_80_20] = scheme_result(layer, Scheme.HOLDOUT_80_20, test)
        results.append(result)
    return results
