import os
from importlib.util import find_spec


_TRUE = ('y', 'yes', 't', 'true', 'on', '1')
_FALSE = ('n', 'no', 'f', 'false', 'off', '0')


def env_to_bool(name, default):
    value = os.environ.get(name, "{}".format(default)).strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ValueError("Invalid truth value {!r} for environment variable {}".format(value, name))


def env_to_int(name, default):
    return int(os.environ.get(name, "{}".format(default)))


NUMBA_AVAILABLE = find_spec('numba') is not None
NUMBA_ENABLED = env_to_bool('VGGFER_NUMBA', NUMBA_AVAILABLE) and NUMBA_AVAILABLE
DETERMINISTIC = env_to_bool('VGGFER_DETERMINISTIC', True)
VERBOSE = env_to_bool('VGGFER_VERBOSE', False)
# Column block width used when streaming wide feature matrices through float64 accumulators
BLOCK_COLUMNS = env_to_int('VGGFER_BLOCK_COLUMNS', 65536)
