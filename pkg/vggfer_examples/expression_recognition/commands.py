# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Implementation of the ``vggfer`` subcommands.

Every command takes a resolved :class:`RunConfig` (or its own arguments) and a :class:`Logger`,
and returns what it produced so tests can inspect it without parsing the log.
"""

import json
import os
import time
from dataclasses import replace
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import torch

import vggfer
from vggfer.core.pca import PcaModel, pca_fit, pca_transform
from vggfer.core.svm import SvmModel, svm_predict, svm_train_ovr
from vggfer.data import (
    Corpus, FeatureCache, FeatureSet, ImageSample, extract_features, generate_synthetic_corpus, load_corpus,
    load_images, preprocess_batch)
from vggfer.enum import Scheme, TapPoint
from vggfer.evalkit import (
    EvalResult, SelectionResult, SvmParams, append_selection, evaluate_grid, load_report, make_split, metrics,
    report_results, select_parameters, selection_record, write_report)
from vggfer.exceptions import BundleError, ConfigError, ReportError
from vggfer.io.bundle import dump_json, file_digest
from vggfer.nn.vgg import WeightBundle, load_bundle, make_micro_bundle
from vggfer.oracle.crosscheck import CheckResult, run_crosschecks
from .logger import AverageMeter, Logger
from .run_config import RunConfig

MODEL_MANIFEST = 'manifest.json'
PCA_BUNDLE = 'pca.bundle'
SVM_BUNDLE = 'svm.bundle'
PREDICT_BATCH_SIZE = 16


class Extraction(NamedTuple):
    corpus: Corpus
    bundle: WeightBundle
    features: FeatureSet


class Evaluation(NamedTuple):
    svm: SvmParams
    results: List[EvalResult]
    report_path: str


class FinalModel(NamedTuple):
    layer: TapPoint
    n_pca: int
    pca: PcaModel
    svm: SvmModel
    train_ids: Tuple[str, ...]
    holdout_accuracy: float


class PipelineRun(NamedTuple):
    extraction: Extraction
    evaluation: Evaluation
    selection: SelectionResult
    model: FinalModel
    manifest_path: str


def _pct(value: float) -> str:
    return '{:.2f}'.format(100.0 * value)


def sweep_dir(output_dir: str, C: float) -> str:
    return os.path.join(output_dir, 'c_{:g}'.format(C))


def provenance(extraction: Extraction, config: RunConfig) -> Dict[str, Any]:
    return {
        'library_version': vggfer.__version__,
        'weights_hash': extraction.bundle.digest,
        'weights_source': extraction.bundle.source,
        'corpus_hash': extraction.corpus.content_hash,
        'corpus_size': len(extraction.corpus),
        'seed': config.seed}


def load_inputs(config: RunConfig) -> Tuple[Corpus, WeightBundle]:
    config.require('weights', 'corpus_root')
    bundle = load_bundle(config.weights)
    if config.input_size is not None and config.input_size != bundle.spec.input_size:
        raise ConfigError("INPUT_SIZE {} does not match the {}x{} input of weights {}".format(
            config.input_size, bundle.spec.input_size, bundle.spec.input_size, config.weights))
    corpus = load_corpus(config.corpus_root, config.on_error)
    return corpus, bundle


def cmd_extract(config: RunConfig, logger: Logger, progress: bool = False) -> Extraction:
    corpus, bundle = load_inputs(config)
    logger.info('Corpus {}: {} images, {}'.format(
        config.corpus_root, len(corpus), ', '.join('{} {}'.format(l, n) for l, n in corpus.class_counts.items())))
    logger.info('Weights {}: {} parameters, input {}, digest {}'.format(
        config.weights, bundle.parameter_count(), bundle.spec.input_size, bundle.digest))
    cache = FeatureCache(config.cache_dir) if config.cache_dir else None
    with torch.no_grad():
        features = extract_features(
            corpus, bundle, config.taps, cache=cache, batch_size=config.batch_size, means=config.means,
            progress=progress)
    for tap, matrix in features.items():
        status = 'cache hit' if tap in features.cache_hits else 'computed'
        logger.info('{}: {} x {} ({})'.format(tap.value, matrix.n_samples, matrix.dim, status))
    return Extraction(corpus, bundle, features)


def _evaluate(
        extraction: Extraction,
        config: RunConfig,
        svm: SvmParams,
        out_dir: str,
        logger: Logger,
        progress: bool) -> Evaluation:
    meter = AverageMeter()
    results = []
    layers = list(extraction.features)
    for index, layer in enumerate(layers, start=1):
        start = time.time()
        results.extend(evaluate_grid(
            {layer: extraction.features[layer]}, config.n_pca_grid, config.schemes, svm=svm, seed=config.seed,
            scope=config.scope, pca_per_fold=config.pca_per_fold, solver=config.solver, progress=progress))
        meter.update(time.time() - start)
        logger.layer_timing_cli_log(layer.value, meter, index, len(layers))
    for result in results:
        logger.info('{} n_pca={}: {}'.format(result.layer.value, result.n_pca, ', '.join(
            '{} {}'.format(s.value, _pct(r.accuracy)) for s, r in result.schemes.items())))
    run_config = replace(config, svm=svm).to_dict()
    report_path = write_report(out_dir, results, provenance(extraction, config), config=run_config)
    logger.info('Report written to {}'.format(report_path))
    return Evaluation(svm, results, report_path)


def cmd_evaluate(config: RunConfig, logger: Logger, progress: bool = False) -> List[Evaluation]:
    """One report for the configured C, or one per swept C under ``c_<value>/``."""
    config.require('output_dir')
    extraction = cmd_extract(config, logger, progress)
    if not config.c_sweep:
        return [_evaluate(extraction, config, config.svm, config.output_dir, logger, progress)]
    evaluations = []
    for C in config.c_sweep:
        logger.info('SVM C = {:g}'.format(C))
        svm = config.svm._replace(C=C)
        evaluations.append(_evaluate(extraction, config, svm, sweep_dir(config.output_dir, C), logger, progress))
    return evaluations


def log_selection(selection: SelectionResult, logger: Logger):
    chosen = selection.chosen
    for candidate, difference in zip(selection.candidates, selection.differences):
        logger.info('Candidate {} n_pca={}: a_jk {} a_test {} |difference| {}'.format(
            candidate.layer.value, candidate.n_pca, candidate.a_jk, candidate.a_test, difference))
    logger.info('Selected layer {} n_pca {}: a_jk {} ({}%), a_test {} ({}%)'.format(
        chosen.layer.value, chosen.n_pca, chosen.a_jk, _pct(chosen.a_jk), chosen.a_test, _pct(chosen.a_test)))
    logger.info(selection.note)


def cmd_select(report_path: str, logger: Logger) -> SelectionResult:
    report = load_report(report_path)
    selection = select_parameters(report_results(report))
    append_selection(report_path, selection)
    log_selection(selection, logger)
    return selection


def train_final_model(extraction: Extraction, config: RunConfig, layer: TapPoint, n_pca: int) -> FinalModel:
    """PCA and SVM fitted on the training side of the seeded 80/20 split, scored on its test side."""
    features = extraction.features[layer]
    plan = make_split(features, Scheme.HOLDOUT_80_20, config.seed)
    row_of = {sample_id: row for row, sample_id in enumerate(features.sample_ids)}
    train = features.rows([row_of[i] for i in plan.train_ids])
    test = features.rows([row_of[i] for i in plan.test_ids])
    pca = pca_fit(train, n_pca, solver=config.solver)
    svm = svm_train_ovr(
        pca_transform(pca, train), train.labels, C=config.svm.C, tol=config.svm.tol,
        max_epochs=config.svm.max_epochs, seed=config.seed)
    scored = metrics(svm_predict(svm, pca_transform(pca, test)), test.labels)
    return FinalModel(layer, n_pca, pca, svm, plan.train_ids, scored.accuracy)


def _file_digests(out_dir: str, names: Sequence[str]) -> Dict[str, str]:
    digests = {}
    for name in names:
        path = os.path.join(out_dir, name)
        if os.path.isdir(path):
            for child in sorted(os.listdir(path)):
                digests['{}/{}'.format(name, child)] = file_digest(os.path.join(path, child))
        elif os.path.isfile(path):
            digests[name] = file_digest(path)
    return digests


def cmd_pipeline(config: RunConfig, logger: Logger, progress: bool = False) -> PipelineRun:
    """Extract, evaluate, select, then train and serialize the final model into the output directory."""
    config.require('output_dir')
    if config.c_sweep:
        logger.info('C_SWEEP is ignored by the pipeline, the final model uses C = {:g}'.format(config.svm.C))
    out_dir = config.output_dir
    extraction = cmd_extract(config, logger, progress)
    evaluation = _evaluate(extraction, config, config.svm, out_dir, logger, progress)
    selection = select_parameters(evaluation.results)
    append_selection(evaluation.report_path, selection)
    log_selection(selection, logger)

    chosen = selection.chosen
    model = train_final_model(extraction, config, chosen.layer, chosen.n_pca)
    model.pca.save(os.path.join(out_dir, PCA_BUNDLE))
    model.svm.save(os.path.join(out_dir, SVM_BUNDLE))
    logger.info('Final model {} n_pca={} (k={}, explained variance {}%), holdout accuracy {}%'.format(
        chosen.layer.value, chosen.n_pca, model.pca.k, _pct(float(model.pca.explained_variance_ratio.sum())),
        _pct(model.holdout_accuracy)))

    manifest = {
        'library_version': vggfer.__version__,
        'seed': config.seed,
        'config': config.to_dict(),
        'provenance': provenance(extraction, config),
        'selection': selection_record(selection),
        'model': {
            'layer': chosen.layer.value,
            'n_pca': chosen.n_pca,
            'effective_k': model.pca.k,
            'explained_variance': float(model.pca.explained_variance_ratio.sum()),
            'train_samples': len(model.train_ids),
            'holdout_accuracy': model.holdout_accuracy,
            'input_size': extraction.bundle.spec.input_size,
            'means': list(config.means),
            'classes': list(model.svm.classes)},
        'files': _file_digests(out_dir, ['report.json', 'results.csv', 'summary.csv', PCA_BUNDLE, SVM_BUNDLE])}
    manifest_path = os.path.join(out_dir, MODEL_MANIFEST)
    dump_json(manifest, manifest_path)
    logger.info('Model manifest written to {}'.format(manifest_path))
    return PipelineRun(extraction, evaluation, selection, model, manifest_path)


def predict_samples(
        bundle: WeightBundle,
        pca: PcaModel,
        svm: SvmModel,
        layer: TapPoint,
        samples: Sequence[ImageSample],
        means: Sequence[float]) -> List[str]:
    labels = []
    network = bundle.network()
    with torch.no_grad():
        for start in range(0, len(samples), PREDICT_BATCH_SIZE):
            batch = preprocess_batch(samples[start:start + PREDICT_BATCH_SIZE], bundle.spec.input_size, means)
            features = network.forward_with_taps(batch, [layer])[layer]
            labels.extend(svm_predict(svm, pca_transform(pca, features)))
    return labels


def load_model_manifest(model_dir: str) -> Dict[str, Any]:
    path = os.path.join(model_dir, MODEL_MANIFEST)
    if not os.path.isfile(path):
        raise ReportError("Model directory {} has no {}; run the pipeline first".format(model_dir, MODEL_MANIFEST))
    with open(path, 'r', encoding='utf-8') as f:
        manifest = json.load(f)
    if 'model' not in manifest or 'provenance' not in manifest:
        raise ReportError("{} is not a pipeline model manifest".format(path))
    return manifest


def cmd_predict(
        model_dir: str,
        images: Sequence[str],
        logger: Logger,
        weights: Optional[str] = None) -> List[Tuple[str, str]]:
    manifest = load_model_manifest(model_dir)
    model = manifest['model']
    weights = weights or manifest['config']['weights']
    bundle = load_bundle(weights)
    if bundle.digest != manifest['provenance']['weights_hash']:
        raise BundleError("Weights {} (digest {}) differ from the weights the model was trained with ({})".format(
            weights, bundle.digest, manifest['provenance']['weights_hash']))
    pca = PcaModel.load(os.path.join(model_dir, PCA_BUNDLE))
    svm = SvmModel.load(os.path.join(model_dir, SVM_BUNDLE))
    layer = TapPoint.parse(model['layer'])
    logger.info('Model {} n_pca={} from {}'.format(layer.value, model['n_pca'], model_dir))
    labels = predict_samples(bundle, pca, svm, layer, load_images(images), model['means'])
    return list(zip(images, labels))


def cmd_gen_synthetic(
        out_dir: str,
        logger: Logger,
        seed: int = 42,
        per_class: int = 30,
        size: Tuple[int, int] = (256, 256),
        micro_weights: Optional[str] = None,
        micro_seed: int = 0) -> Corpus:
    corpus = generate_synthetic_corpus(out_dir, seed=seed, per_class=per_class, size=size)
    logger.info('Synthetic corpus: {} images of {}x{} under {}, content hash {}'.format(
        len(corpus), size[0], size[1], out_dir, corpus.content_hash))
    if micro_weights is not None:
        bundle = make_micro_bundle(micro_weights, seed=micro_seed)
        logger.info('Micro weights: {} parameters, input {}, written to {}'.format(
            bundle.parameter_count(), bundle.spec.input_size, micro_weights))
    return corpus


def cmd_verify(logger: Logger, seed: int = 0) -> List[CheckResult]:
    results = run_crosschecks(seed)
    for result in results:
        logger.info('{} {}: {}'.format('PASS' if result.passed else 'FAIL', result.name, result.detail))
    return results
