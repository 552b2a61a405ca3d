from enum import auto

from vggfer.utils.python_utils import AutoName


class TapPoint(AutoName):
    """Layers whose activations are exported as feature vectors, shallowest first."""
    BLOCK1_POOL = auto()
    BLOCK2_POOL = auto()
    BLOCK3_POOL = auto()
    BLOCK4_POOL = auto()
    BLOCK5_POOL = auto()
    FC1 = auto()

    @property
    def depth(self) -> int:
        return list(TapPoint).index(self)


class Scheme(AutoName):
    HOLDOUT_80_20 = auto()
    KFOLD_10 = auto()
    JACKKNIFE = auto()


class Expression(AutoName):
    ANGER = auto()
    DISGUST = auto()
    FEAR = auto()
    HAPPY = auto()
    NEUTRAL = auto()
    SAD = auto()
    SURPRISE = auto()


class PcaSolver(AutoName):
    EIGH = auto()
    JACOBI = auto()


class ValidationScope(AutoName):
    FULL = auto()
    TRAIN = auto()


class OnError(AutoName):
    ABORT = auto()
    SKIP = auto()


EXPRESSIONS = tuple(e.value for e in Expression)
