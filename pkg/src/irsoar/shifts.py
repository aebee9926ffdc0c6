"""Exact and refined shift candidates, and shift selection."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import RankDeficient
from .ritz import small_qep

RANK_TOL = 1e-10


class Strategy(str, Enum):
    ALL_SHIFTS = "all"
    FARTHEST_P = "farthest"


@dataclass
class ShiftSet:
    candidates: np.ndarray
    kind: str
    strategy: Strategy = None
    selected: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))


def complement_basis(G):
    """Orthonormal basis of the orthogonal complement of ``range(G)`` in ``C^m``."""
    G = np.atleast_2d(np.asarray(G, dtype=np.complex128))
    m, k = G.shape
    if k == 0:
        return np.eye(m, dtype=np.complex128)
    U, s, _ = np.linalg.svd(G)
    if k > m or s[-1] <= RANK_TOL * s[0]:
        raise RankDeficient(f"kept vectors have rank < {k}")
    return U[:, k:]


def independent_pairs(pairs, count, tol=1e-8):
    """First ``count`` pairs (in order) whose coordinate vectors are independent.

    Two approximate eigenvalues can share (nearly) one approximate
    eigenvector; a dependent vector is skipped.
    """
    chosen, basis = [], []
    for pair in pairs:
        if len(chosen) == count:
            break
        g = pair.g / np.linalg.norm(pair.g)
        if basis:
            B = np.column_stack(basis)
            g = g - B @ (B.conj().T @ g)
            g = g - B @ (B.conj().T @ g)
        ng = np.linalg.norm(g)
        if ng > tol:
            chosen.append(pair)
            basis.append(g / ng)
    return chosen


def shift_candidates(subspace, kept, kind):
    """Eigenvalues of the QEP projected onto the complement of the kept vectors.

    ``kept`` holds the approximate eigenpairs to protect; their coordinate
    vectors (Ritz ``g`` or refined ``z``) span the part of the subspace that
    is kept.  The complement has dimension ``p = m - len(kept)`` and yields
    ``2p`` candidates in the iterated variable.
    """
    m = subspace.dim
    G = np.column_stack([p.g for p in kept]) if kept else np.zeros((m, 0), complex)
    Z = complement_basis(G)
    if Z.shape[1] == 0:
        return ShiftSet(np.zeros(0, complex), kind)
    thetas, _ = small_qep(*subspace.project(Z))
    return ShiftSet(_sorted(thetas), kind)


def _sorted(mus):
    mus = np.asarray(mus, dtype=np.complex128)
    return mus[np.lexsort((mus.imag, mus.real, np.abs(mus)))]


def select_shifts(s, strategy, p=None):
    """All candidates, or the ``p`` farthest from the target (smallest ``|mu|``)."""
    strategy = Strategy(strategy)
    cands = _sorted(s.candidates)
    if strategy is Strategy.ALL_SHIFTS:
        selected = cands
    else:
        if p is None:
            p = len(cands) // 2
        selected = cands[:p]
    return ShiftSet(s.candidates, s.kind, strategy, selected)
