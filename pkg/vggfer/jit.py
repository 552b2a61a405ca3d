from vggfer.config import NUMBA_ENABLED


def _disabled(fn):
    return fn


if NUMBA_ENABLED:

    import numba

    njit = numba.njit(nogil=True, cache=False)

else:

    njit = _disabled
