# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Run configuration read from ``cfg/*.ini`` files and overridden from the command line."""

import os
from configparser import ConfigParser
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Tuple

from vggfer.data.preprocess import DEFAULT_MEANS
from vggfer.enum import OnError, PcaSolver, Scheme, TapPoint, ValidationScope
from vggfer.evalkit.protocol import SvmParams
from vggfer.exceptions import ConfigError
from vggfer.nn.vgg import parse_taps

__all__ = ['RunConfig', 'config_path', 'config_with_name', 'parse_list']

CFG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'cfg')
DEFAULT_N_PCA_GRID = (50, 100, 150, 200)
DEFAULT_TAPS = tuple(TapPoint)
DEFAULT_SCHEMES = tuple(Scheme)


def parse_list(value: Optional[str], cast=str) -> List[Any]:
    if value is None:
        return []
    return [cast(item.strip()) for item in value.split(',') if item.strip()]


@dataclass(frozen=True)
class RunConfig:
    weights: Optional[str] = None
    source: str = ''
    means: Tuple[float, float, float] = DEFAULT_MEANS
    input_size: Optional[int] = None
    corpus_root: Optional[str] = None
    on_error: OnError = OnError.ABORT
    taps: Tuple[TapPoint, ...] = DEFAULT_TAPS
    batch_size: int = 16
    cache_dir: Optional[str] = None
    n_pca_grid: Tuple[int, ...] = DEFAULT_N_PCA_GRID
    solver: PcaSolver = PcaSolver.EIGH
    pca_per_fold: bool = True
    svm: SvmParams = SvmParams()
    c_sweep: Tuple[float, ...] = ()
    schemes: Tuple[Scheme, ...] = DEFAULT_SCHEMES
    scope: ValidationScope = ValidationScope.FULL
    seed: int = 0
    output_dir: Optional[str] = None
    name: str = field(default='default', compare=False)

    def validate(self) -> 'RunConfig':
        if not self.n_pca_grid or min(self.n_pca_grid) < 1:
            raise ConfigError("N_PCA_GRID must hold positive integers, got {}".format(list(self.n_pca_grid)))
        if not self.schemes:
            raise ConfigError("SCHEMES must name at least one validation scheme")
        if not self.taps:
            raise ConfigError("TAPS must name at least one layer")
        if self.batch_size < 1:
            raise ConfigError("BATCH_SIZE must be positive, got {}".format(self.batch_size))
        if self.svm.C <= 0 or any(c <= 0 for c in self.c_sweep):
            raise ConfigError("SVM C values must be positive, got {} and sweep {}".format(
                self.svm.C, list(self.c_sweep)))
        if len(self.means) != 3:
            raise ConfigError("PREPROCESS needs exactly three channel means, got {}".format(list(self.means)))
        return self

    def require(self, *names: str):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError("Configuration {} does not set {}; pass it on the command line".format(
                    self.name, name))

    def with_overrides(self, args) -> 'RunConfig':
        """Replace every field whose command-line counterpart was given."""
        changes = {}
        for name in ('weights', 'corpus_root', 'cache_dir', 'output_dir'):
            value = getattr(args, name, None)
            if value is not None:
                changes[name] = _abspath(value)
        for name in ('seed', 'batch_size'):
            value = getattr(args, name, None)
            if value is not None:
                changes[name] = value
        if getattr(args, 'taps', None) is not None:
            changes['taps'] = _taps(args.taps)
        if getattr(args, 'n_pca_grid', None) is not None:
            changes['n_pca_grid'] = _int_list(args.n_pca_grid)
        if getattr(args, 'schemes', None) is not None:
            changes['schemes'] = _schemes(args.schemes)
        if getattr(args, 'scope', None) is not None:
            changes['scope'] = ValidationScope.parse(args.scope)
        if getattr(args, 'solver', None) is not None:
            changes['solver'] = PcaSolver.parse(args.solver)
        if getattr(args, 'on_error', None) is not None:
            changes['on_error'] = OnError.parse(args.on_error)
        if getattr(args, 'pca_global', False):
            changes['pca_per_fold'] = False
        svm = self.svm
        if getattr(args, 'svm_c', None) is not None:
            svm = svm._replace(C=args.svm_c)
        if getattr(args, 'svm_tol', None) is not None:
            svm = svm._replace(tol=args.svm_tol)
        if getattr(args, 'svm_max_epochs', None) is not None:
            svm = svm._replace(max_epochs=args.svm_max_epochs)
        changes['svm'] = svm
        if getattr(args, 'svm_c_sweep', None) is not None:
            changes['c_sweep'] = tuple(parse_list(args.svm_c_sweep, float))
        return replace(self, **changes).validate()

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view, enum members as their values."""
        return {
            'weights': self.weights,
            'source': self.source,
            'means': list(self.means),
            'input_size': self.input_size,
            'corpus_root': self.corpus_root,
            'on_error': self.on_error.value,
            'taps': [t.value for t in self.taps],
            'batch_size': self.batch_size,
            'cache_dir': self.cache_dir,
            'n_pca_grid': list(self.n_pca_grid),
            'solver': self.solver.value,
            'pca_per_fold': self.pca_per_fold,
            'svm': {'C': self.svm.C, 'tol': self.svm.tol, 'max_epochs': self.svm.max_epochs},
            'c_sweep': list(self.c_sweep),
            'schemes': [s.value for s in self.schemes],
            'scope': self.scope.value,
            'seed': self.seed,
            'output_dir': self.output_dir}


def _abspath(path: str) -> str:
    return path if os.path.isabs(path) else os.path.abspath(os.path.join(os.getcwd(), path))


def _optional_path(value: Optional[str]) -> Optional[str]:
    return _abspath(value) if value else None


def _int_list(value: str) -> Tuple[int, ...]:
    try:
        return tuple(parse_list(value, int))
    except ValueError:
        raise ConfigError("Expected a comma separated list of integers, got {!r}".format(value))


def _taps(value: str) -> Tuple[TapPoint, ...]:
    try:
        return tuple(parse_taps(parse_list(value)))
    except ValueError as e:
        raise ConfigError(str(e))


def _schemes(value: str) -> Tuple[Scheme, ...]:
    try:
        return tuple(Scheme.parse(s) for s in parse_list(value))
    except ValueError as e:
        raise ConfigError(str(e))


def config_path(name: str) -> str:
    """Path of a bundled ``cfg/<name>.ini`` or of an explicit ini file."""
    if os.path.isfile(name):
        return name
    path = os.path.join(CFG_DIR, name + '.ini')
    if not os.path.isfile(path):
        available = sorted(os.path.splitext(f)[0] for f in os.listdir(CFG_DIR) if f.endswith('.ini'))
        raise ConfigError("No configuration {}: not a file and not one of {}".format(name, available))
    return path


def config_with_name(name: Optional[str] = None) -> RunConfig:
    if name is None:
        return RunConfig()
    path = config_path(name)
    cfg = ConfigParser()
    cfg.read(path)
    try:
        input_size = cfg.get('PREPROCESS', 'INPUT_SIZE', fallback='')
        return RunConfig(
            weights=_optional_path(cfg.get('MODEL', 'WEIGHTS', fallback='')),
            source=cfg.get('MODEL', 'SOURCE', fallback=''),
            means=tuple(cfg.getfloat('PREPROCESS', 'MEAN_{}'.format(i), fallback=m)
                        for i, m in enumerate(DEFAULT_MEANS)),
            input_size=int(input_size) if input_size else None,
            corpus_root=_optional_path(cfg.get('CORPUS', 'ROOT', fallback='')),
            on_error=OnError.parse(cfg.get('CORPUS', 'ON_ERROR', fallback='abort')),
            taps=_taps(cfg.get('FEATURES', 'TAPS', fallback=','.join(t.value for t in DEFAULT_TAPS))),
            batch_size=cfg.getint('FEATURES', 'BATCH_SIZE', fallback=16),
            cache_dir=_optional_path(cfg.get('FEATURES', 'CACHE_DIR', fallback='')),
            n_pca_grid=_int_list(cfg.get('PCA', 'N_PCA_GRID', fallback='50,100,150,200')),
            solver=PcaSolver.parse(cfg.get('PCA', 'SOLVER', fallback='eigh')),
            pca_per_fold=cfg.getboolean('PCA', 'PER_FOLD', fallback=True),
            svm=SvmParams(
                C=cfg.getfloat('SVM', 'C', fallback=SvmParams().C),
                tol=cfg.getfloat('SVM', 'TOL', fallback=SvmParams().tol),
                max_epochs=cfg.getint('SVM', 'MAX_EPOCHS', fallback=SvmParams().max_epochs)),
            c_sweep=tuple(parse_list(cfg.get('SVM', 'C_SWEEP', fallback=''), float)),
            schemes=_schemes(cfg.get('EVAL', 'SCHEMES', fallback=','.join(s.value for s in DEFAULT_SCHEMES))),
            scope=ValidationScope.parse(cfg.get('EVAL', 'SCOPE', fallback='full')),
            seed=cfg.getint('EVAL', 'SEED', fallback=0),
            output_dir=_optional_path(cfg.get('OUTPUT', 'DIR', fallback='')),
            name=os.path.splitext(os.path.basename(path))[0]).validate()
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError("Configuration {} is invalid: {}".format(path, e))
