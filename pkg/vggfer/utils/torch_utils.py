from packaging import version

import torch

TORCH_VERSION = version.parse(torch.__version__.split('+')[0])
HAS_DETERMINISTIC_ALGORITHMS = TORCH_VERSION >= version.parse('1.8.0')
HAS_LINALG_EIGH = TORCH_VERSION >= version.parse('1.8.0')


def set_deterministic():
    if HAS_DETERMINISTIC_ALGORITHMS:
        torch.use_deterministic_algorithms(True)
    elif hasattr(torch, 'set_deterministic'):
        torch.set_deterministic(True)


def symmetric_eigh(a: torch.Tensor):
    """Ascending eigenvalues and column eigenvectors of a symmetric matrix, across torch versions."""
    if HAS_LINALG_EIGH:
        return torch.linalg.eigh(a)
    return torch.symeig(a, eigenvectors=True)
