"""Small dense complex linear algebra used by every other module."""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NoConvergence, ZeroVector

DROP_TOL = 1e-14


@dataclass(frozen=True)
class Reflector:
    """Householder reflector ``I - beta v v^H`` acting on entries ``offset:``."""

    v: np.ndarray
    beta: float
    offset: int = 0

    def matrix(self, size=None):
        size = self.offset + len(self.v) if size is None else size
        W = np.eye(size, dtype=np.complex128)
        sl = slice(self.offset, self.offset + len(self.v))
        W[sl, sl] -= self.beta * np.outer(self.v, self.v.conj())
        return W

    def apply(self, x):
        """Return ``W x`` for a vector or a matrix (applied column-wise)."""
        x = np.array(x, dtype=np.complex128)
        sl = slice(self.offset, self.offset + len(self.v))
        seg = x[sl]
        if x.ndim == 1:
            x[sl] = seg - self.beta * self.v * np.vdot(self.v, seg)
        else:
            x[sl] = seg - self.beta * np.outer(self.v, self.v.conj() @ seg)
        return x


def householder_to_last(b, scale=None):
    """Reflector ``W`` with ``W b = alpha e_m`` and ``|alpha| = ||b||``.

    ``W`` is Hermitian, so it is its own inverse.  ``scale`` sets the context
    for the zero test (``||b|| <= 1e-14 * scale``); by default only an exactly
    zero vector is rejected.
    """
    b = np.asarray(b, dtype=np.complex128)
    nrm = np.linalg.norm(b)
    limit = 0.0 if scale is None else DROP_TOL * scale
    if not np.isfinite(nrm) or nrm <= limit:
        raise ZeroVector(f"cannot reflect vector of norm {nrm:.3e}")
    v, beta, alpha = _kernels.reflector(b, len(b) - 1)
    return Reflector(v, beta), alpha


def qr_factor(A):
    """Householder QR of a square matrix: ``A = V R``, ``V`` unitary."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"qr_factor needs a square matrix, got {A.shape}")
    return _kernels.householder_qr(A)


def shifted_qr_sweep(T, b, mu):
    """One explicitly shifted QR step on an upper Hessenberg ``T``.

    Factor ``T - mu I = V R`` and return ``(V^H T V, b V, V)``.  Entries of the
    new matrix below the first subdiagonal are zero in exact arithmetic and are
    set to zero here so the Hessenberg pattern (and the fill pattern of ``b``)
    stays exact from sweep to sweep.
    """
    T = np.asarray(T, dtype=np.complex128)
    m = T.shape[0]
    V, _ = qr_factor(T - mu * np.eye(m))
    Tn = V.conj().T @ T @ V
    Tn[np.tril_indices(m, -2)] = 0.0
    bn = np.asarray(b, dtype=np.complex128) @ V
    return Tn, bn, V


def dense_eig(A):
    """Eigenvalues ``w`` and unit eigenvectors (columns of ``X``) of a small matrix."""
    A = np.asarray(A, dtype=np.complex128)
    if not np.all(np.isfinite(A)):
        raise NoConvergence("matrix has non-finite entries")
    try:
        w, X = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    X = X / np.linalg.norm(X, axis=0)
    return w, X


def smallest_right_singular_vector(S):
    """``(sigma_min, z)`` for an ``n x m`` matrix with ``n >= m``.

    Tall inputs are first compressed by a thin QR so the SVD works on an
    ``m x m`` triangle; no Gram matrix is formed, so small singular values keep
    full relative accuracy.  The phase of ``z`` is fixed so that its largest
    entry is real and positive.
    """
    S = np.asarray(S, dtype=np.complex128)
    n, m = S.shape
    if n < m:
        raise ValueError(f"need at least as many rows as columns, got {S.shape}")
    if n > m:
        S = np.linalg.qr(S, mode="r")
    _, s, Vh = np.linalg.svd(S)
    z = Vh[-1].conj()
    i = np.argmax(np.abs(z))
    z = z * (abs(z[i]) / z[i])
    return float(s[-1]), z / np.linalg.norm(z)
