# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

import argparse
import os
import sys

import torch

from vggfer.enum import OnError, PcaSolver, Scheme, ValidationScope
from vggfer.exceptions import VggferError
from .commands import (
    cmd_evaluate, cmd_extract, cmd_gen_synthetic, cmd_pipeline, cmd_predict, cmd_select, cmd_verify)
from .logger import Logger
from .run_config import config_with_name

# Pytorch precision
torch.set_printoptions(precision=10)

SUCCESS = 0
COMPUTATION_FAILURE = 1
USAGE_FAILURE = 2


# Util method to add mutually exclusive boolean
def add_bool_arg(parser, name, default, help=None):
    dest = name.replace('-', '_')
    group = parser.add_mutually_exclusive_group(required=False)
    group.add_argument("--" + name, dest=dest, action="store_true", help=help)
    group.add_argument("--no-" + name, dest=dest, action="store_false")
    parser.set_defaults(**{dest: default})


def _choices(enum):
    return [member.value for member in enum]


def config_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", default=None, help="Bundled config name (cfg/<name>.ini) or path to an ini file")
    # I/O
    parser.add_argument("--weights", default=None, help="VGG19 weight bundle directory")
    parser.add_argument("--corpus", dest="corpus_root", default=None, help="Labelled corpus root")
    parser.add_argument("--cache-dir", default=None, help="Feature cache directory")
    parser.add_argument("--output-dir", default=None, help="Directory receiving reports and models")
    parser.add_argument("--on-error", default=None, choices=_choices(OnError), help="Unreadable images policy")
    # Features
    parser.add_argument("--taps", default=None, help="Comma separated tap points")
    parser.add_argument("--batch-size", default=None, type=int, help="Images per forward pass")
    # PCA
    parser.add_argument("--n-pca-grid", default=None, help="Comma separated component counts")
    parser.add_argument("--solver", default=None, choices=_choices(PcaSolver), help="Symmetric eigensolver")
    parser.add_argument("--pca-global", action="store_true", help="Fit PCA once on all rows before folding")
    # SVM
    parser.add_argument("--svm-c", default=None, type=float, help="SVM penalty C")
    parser.add_argument("--svm-tol", default=None, type=float, help="Dual coordinate descent tolerance")
    parser.add_argument("--svm-max-epochs", default=None, type=int, help="Dual coordinate descent epoch cap")
    parser.add_argument("--svm-c-sweep", default=None, help="Comma separated C values, one report each")
    # Evaluation
    parser.add_argument("--schemes", default=None, help="Comma separated validation schemes ({})".format(
        ', '.join(_choices(Scheme))))
    parser.add_argument("--scope", default=None, choices=_choices(ValidationScope),
                        help="Run jackknife and 10-fold on the full corpus or the holdout training side")
    parser.add_argument("--seed", default=None, type=int, help="Seed of splits and solvers")
    add_bool_arg(parser, "progress", default=False, help="Show progress bars")
    return parser


def parse_args(args):
    common = config_parser()
    parser = argparse.ArgumentParser(
        prog='vggfer', description="Facial expression recognition on VGG19 features with PCA and a linear SVM")
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    subparsers.add_parser("extract", parents=[common], help="Extract and cache features of every tap point")
    subparsers.add_parser("evaluate", parents=[common], help="Evaluate the (layer, n_pca) grid into a report")
    subparsers.add_parser("pipeline", parents=[common], help="Extract, evaluate, select and train the final model")
    select = subparsers.add_parser("select", help="Apply the two-step selection to an evaluation report")
    select.add_argument("report", help="report.json or the directory holding it")
    predict = subparsers.add_parser("predict", help="Label images with a model written by the pipeline")
    predict.add_argument("--model-dir", required=True, help="Pipeline output directory")
    predict.add_argument("--weights", default=None, help="Override the weight bundle recorded in the model")
    predict.add_argument("images", nargs="+", help="PGM or PNG grayscale images")
    synthetic = subparsers.add_parser("gen-synthetic", help="Write the seeded synthetic expression corpus")
    synthetic.add_argument("--out", required=True, help="Corpus root to create")
    synthetic.add_argument("--seed", default=42, type=int, help="Corpus seed")
    synthetic.add_argument("--per-class", default=30, type=int, help="Images per expression")
    synthetic.add_argument("--size", default=[256, 256], type=int, nargs=2, metavar=("HEIGHT", "WIDTH"))
    synthetic.add_argument("--micro-weights", default=None, help="Also write random VGG19-micro weights here")
    synthetic.add_argument("--micro-seed", default=0, type=int, help="Seed of the micro weights")
    verify = subparsers.add_parser("verify", help="Cross-check kernels, resize, PCA and SVM against the oracles")
    verify.add_argument("--seed", default=0, type=int, help="Seed of the random instances")
    return parser.parse_args(args)


def resolve_config(args):
    return config_with_name(args.config).with_overrides(args)


def run_extract(args, logger):
    cmd_extract(resolve_config(args), logger, args.progress)
    return SUCCESS


def run_evaluate(args, logger):
    config = resolve_config(args)
    config.require('output_dir')
    logger.log_to_dir(config.output_dir)
    cmd_evaluate(config, logger, args.progress)
    return SUCCESS


def run_pipeline(args, logger):
    config = resolve_config(args)
    config.require('output_dir')
    logger.log_to_dir(config.output_dir)
    cmd_pipeline(config, logger, args.progress)
    return SUCCESS


def run_select(args, logger):
    cmd_select(args.report, logger)
    return SUCCESS


def run_predict(args, logger):
    for path, label in cmd_predict(args.model_dir, args.images, logger, weights=args.weights):
        print('{}\t{}'.format(path, label))
    return SUCCESS


def run_gen_synthetic(args, logger):
    cmd_gen_synthetic(
        args.out, logger, seed=args.seed, per_class=args.per_class, size=tuple(args.size),
        micro_weights=args.micro_weights, micro_seed=args.micro_seed)
    return SUCCESS


def run_verify(args, logger):
    results = cmd_verify(logger, seed=args.seed)
    return SUCCESS if all(r.passed for r in results) else COMPUTATION_FAILURE


COMMANDS = {
    'extract': run_extract,
    'evaluate': run_evaluate,
    'pipeline': run_pipeline,
    'select': run_select,
    'predict': run_predict,
    'gen-synthetic': run_gen_synthetic,
    'verify': run_verify}


def launch(cmd_args):
    args = parse_args(cmd_args)

    # Set relative paths relative to current workdir
    for path_arg in ("report", "model_dir", "out", "micro_weights"):
        path = getattr(args, path_arg, None)
        if path is not None and not os.path.isabs(path):
            setattr(args, path_arg, os.path.abspath(os.path.join(os.getcwd(), path)))

    logger = Logger()
    try:
        return COMMANDS[args.command](args, logger)
    except VggferError as e:
        logger.error('{}: {}'.format(type(e).__name__, e))
        return e.exit_code
    except (OSError, ValueError) as e:
        logger.error('{}: {}'.format(type(e).__name__, e))
        return USAGE_FAILURE
    finally:
        logger.close()


def main():
    sys.exit(launch(sys.argv[1:]))


if __name__ == "__main__":
    main()
