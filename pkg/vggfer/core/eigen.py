# BSD 3-Clause License
# Copyright (c) 2021, the vggfer authors

"""Symmetric eigendecomposition for the small Gram and covariance matrices PCA reduces to."""

import warnings
from typing import List, Tuple, Union

import torch
from torch import Tensor

from vggfer.enum import PcaSolver
from vggfer.exceptions import ConvergenceWarning, ShapeMismatchError
from vggfer.utils.torch_utils import symmetric_eigh as _lapack_eigh

__all__ = ['symmetric_eigh', 'jacobi_eigh', 'round_robin_pairs']

JACOBI_TOL = 1e-10
JACOBI_MAX_SWEEPS = 100


def round_robin_pairs(n: int) -> List[Tuple[Tensor, Tensor]]:
    """Disjoint (p, q) index pairs per round, p < q, such that n - 1 (or n, for odd n) rounds cover every pair once."""
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        p_idx, q_idx = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                p_idx.append(min(a, b))
                q_idx.append(max(a, b))
        if p_idx:
            rounds.append((torch.tensor(p_idx, dtype=torch.long), torch.tensor(q_idx, dtype=torch.long)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(a: Tensor) -> Tensor:
    return torch.sqrt(torch.sum(a * a) - torch.sum(torch.diagonal(a) ** 2)).clamp_min(0.0)


def jacobi_eigh(
        a: Tensor, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Tuple[Tensor, Tensor]:
    """Cyclic Jacobi with a parallel (round-robin) ordering of rotations.

    Each round annihilates a set of disjoint off-diagonal pairs at once. Iteration stops when the
    off-diagonal Frobenius norm drops below ``tol`` times the Frobenius norm of ``a``, or after
    ``max_sweeps`` sweeps with a ConvergenceWarning.

    Returns
    -------
    tuple
        (eigenvalues, eigenvectors as columns), unsorted
    """
    a = a.to(torch.float64).clone()
    n = a.shape[0]
    v = torch.eye(n, dtype=torch.float64)
    threshold = tol * torch.norm(a)
    rounds = round_robin_pairs(n)
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            break
        for p, q in rounds:
            apq = a[p, q]
            nonzero = apq != 0
            theta = 0.5 * (a[q, q] - a[p, p]) / torch.where(nonzero, apq, torch.ones_like(apq))
            t = 1.0 / (theta.abs() + torch.sqrt(theta * theta + 1.0))
            t = torch.where(theta < 0, -t, t)
            t = torch.where(nonzero, t, torch.zeros_like(t))
            c = 1.0 / torch.sqrt(t * t + 1.0)
            s = t * c
            col_p, col_q = a[:, p].clone(), a[:, q].clone()
            a[:, p] = c * col_p - s * col_q
            a[:, q] = s * col_p + c * col_q
            row_p, row_q = a[p, :].clone(), a[q, :].clone()
            a[p, :] = c.unsqueeze(1) * row_p - s.unsqueeze(1) * row_q
            a[q, :] = s.unsqueeze(1) * row_p + c.unsqueeze(1) * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            vec_p, vec_q = v[:, p].clone(), v[:, q].clone()
            v[:, p] = c * vec_p - s * vec_q
            v[:, q] = s * vec_p + c * vec_q
    else:
        if _off_norm(a) > threshold:
            warnings.warn(
                "Jacobi eigensolver did not converge in {} sweeps (off-diagonal norm {:.3e})".format(
                    max_sweeps, float(_off_norm(a))),
                ConvergenceWarning)
    return torch.diagonal(a).clone(), v


def symmetric_eigh(a: Tensor, solver: Union[PcaSolver, str] = PcaSolver.EIGH) -> Tuple[Tensor, Tensor]:
    """Eigenvalues in non-increasing order and matching unit eigenvectors as columns, in float64."""
    solver = PcaSolver.parse(solver)
    if a.dim() != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ShapeMismatchError("Expected a non-empty square matrix, got shape {}".format(tuple(a.shape)))
    a = a.to(torch.float64)
    a = 0.5 * (a + a.t())
    if solver == PcaSolver.JACOBI:
        values, vectors = jacobi_eigh(a)
    else:
        values, vectors = _lapack_eigh(a)
    order = torch.argsort(values, descending=True)
    return values[order], vectors[:, order]
