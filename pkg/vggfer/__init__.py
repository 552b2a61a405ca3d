import warnings

from vggfer import config
from vggfer.utils.torch_utils import set_deterministic

__version__ = '0.1.0'

if config.DETERMINISTIC:
    set_deterministic()

if config.VERBOSE and not config.NUMBA_ENABLED:
    warnings.warn("numba is disabled or missing: the SVM solver runs its inner loop in pure Python")
