"""Hot dense loops: Householder reflectors, QR and the bottom-up Hessenberg
restoration chain.

Each kernel exists twice: an explicit-loop version compiled with numba and a
vectorised numpy version.  The numba path is used when numba imports and the
environment variable ``IRSOAR_DISABLE_NUMBA`` is unset (or ``0``).  Both
paths produce the same reflectors; tests check them against each other.
"""
import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def _numba_requested():
    flag = os.environ.get("IRSOAR_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


USE_NUMBA = _HAVE_NUMBA and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy path
# ---------------------------------------------------------------------------

def _reflector_numpy(x, k):
    x = np.asarray(x, dtype=np.complex128)
    v = x.copy()
    xk = x[k]
    tail = np.hypot(np.linalg.norm(x[:k]), np.linalg.norm(x[k + 1:]))
    if tail == 0.0:
        v[:] = 0.0
        v[k] = 1.0
        return v, 0.0, xk
    nrm = np.sqrt(tail * tail + abs(xk) ** 2)
    phase = xk / abs(xk) if xk != 0 else 1.0 + 0.0j
    alpha = -phase * nrm
    v[k] = xk - alpha
    beta = 1.0 / (nrm * (nrm + abs(xk)))
    return v, beta, alpha


def _qr_numpy(A):
    R = np.array(A, dtype=np.complex128)
    m, n = R.shape
    V = np.eye(m, dtype=np.complex128)
    for j in range(min(m - 1, n)):
        v, beta, alpha = _reflector_numpy(R[j:, j], 0)
        if beta != 0.0:
            R[j:, j:] -= beta * np.outer(v, v.conj() @ R[j:, j:])
            V[:, j:] -= beta * np.outer(V[:, j:] @ v, v.conj())
        R[j, j] = alpha
        R[j + 1:, j] = 0.0
    return V, R


def _restore_numpy(B):
    B = np.array(B, dtype=np.complex128)
    m = B.shape[0]
    U = np.eye(m, dtype=np.complex128)
    for r in range(m - 1, 1, -1):
        # row r: zero columns 0..r-2, keep the subdiagonal at column r-1
        v, beta, alpha = _reflector_numpy(B[r, :r].conj(), r - 1)
        if beta != 0.0:
            B[:, :r] -= beta * np.outer(B[:, :r] @ v, v.conj())
            B[:r, :] -= beta * np.outer(v, v.conj() @ B[:r, :])
            U[:, :r] -= beta * np.outer(U[:, :r] @ v, v.conj())
        B[r, :r - 1] = 0.0
        B[r, r - 1] = np.conj(alpha)
    return B, U


# ---------------------------------------------------------------------------
# numba path
# ---------------------------------------------------------------------------

def _reflector_loops(x, k):
    n = x.shape[0]
    v = np.empty(n, dtype=np.complex128)
    tail2 = 0.0
    for i in range(n):
        v[i] = x[i]
        if i != k:
            tail2 += x[i].real * x[i].real + x[i].imag * x[i].imag
    xk = x[k]
    axk = abs(xk)
    if tail2 == 0.0:
        for i in range(n):
            v[i] = 0.0
        v[k] = 1.0
        return v, 0.0, xk
    nrm = np.sqrt(tail2 + axk * axk)
    if axk != 0.0:
        phase = xk / axk
    else:
        phase = 1.0 + 0.0j
    alpha = -phase * nrm
    v[k] = xk - alpha
    beta = 1.0 / (nrm * (nrm + axk))
    return v, beta, alpha


def _apply_left(M, v, beta, r0, r1, c0, c1):
    # M[r0:r1, c0:c1] <- (I - beta v v^H) M[r0:r1, c0:c1]
    for c in range(c0, c1):
        s = 0.0j
        for i in range(r1 - r0):
            s += np.conj(v[i]) * M[r0 + i, c]
        s *= beta
        for i in range(r1 - r0):
            M[r0 + i, c] -= s * v[i]


def _apply_right(M, v, beta, r0, r1, c0, c1):
    # M[r0:r1, c0:c1] <- M[r0:r1, c0:c1] (I - beta v v^H)
    for r in range(r0, r1):
        s = 0.0j
        for i in range(c1 - c0):
            s += M[r, c0 + i] * v[i]
        s *= beta
        for i in range(c1 - c0):
            M[r, c0 + i] -= s * np.conj(v[i])


def _qr_loops(A):
    m, n = A.shape
    R = A.copy()
    V = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        V[i, i] = 1.0
    for j in range(min(m - 1, n)):
        v, beta, alpha = _reflector(R[j:, j].copy(), 0)
        if beta != 0.0:
            _apply_left(R, v, beta, j, m, j, n)
            _apply_right(V, v, beta, 0, m, j, m)
        R[j, j] = alpha
        for i in range(j + 1, m):
            R[i, j] = 0.0
    return V, R


def _restore_loops(B0):
    B = B0.copy()
    m = B.shape[0]
    U = np.zeros((m, m), dtype=np.complex128)
    for i in range(m):
        U[i, i] = 1.0
    for r in range(m - 1, 1, -1):
        x = np.empty(r, dtype=np.complex128)
        for i in range(r):
            x[i] = np.conj(B[r, i])
        v, beta, alpha = _reflector(x, r - 1)
        if beta != 0.0:
            _apply_right(B, v, beta, 0, m, 0, r)
            _apply_left(B, v, beta, 0, r, 0, m)
            _apply_right(U, v, beta, 0, m, 0, r)
        for i in range(r - 1):
            B[r, i] = 0.0
        B[r, r - 1] = np.conj(alpha)
    return B, U


if _HAVE_NUMBA:
    _reflector = njit(cache=True)(_reflector_loops)
    _apply_left = njit(cache=True)(_apply_left)
    _apply_right = njit(cache=True)(_apply_right)
    _qr_numba = njit(cache=True)(_qr_loops)
    _restore_numba = njit(cache=True)(_restore_loops)
else:  # pragma: no cover
    _reflector = _reflector_loops
    _qr_numba = _qr_numpy
    _restore_numba = _restore_numpy


def reflector(x, k, backend=None):
    """Householder data ``(v, beta, alpha)`` with ``(I - beta v v^H) x = alpha e_k``.

    ``beta`` is real, so the reflector is Hermitian as well as unitary.  When
    ``x`` is already a multiple of ``e_k`` the identity is returned
    (``beta = 0``) and ``alpha = x[k]``.
    """
    x = np.ascontiguousarray(x, dtype=np.complex128)
    if _pick(backend) == "numba":
        v, beta, alpha = _reflector(x, int(k))
        return v, float(beta), complex(alpha)
    v, beta, alpha = _reflector_numpy(x, int(k))
    return v, float(beta), complex(alpha)


def householder_qr(A, backend=None):
    """Square-or-tall Householder QR: returns unitary ``V`` (m x m) and ``R``."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    if _pick(backend) == "numba":
        return _qr_numba(A)
    return _qr_numpy(A)


def restore_chain(B, backend=None):
    """Reduce ``B`` to upper Hessenberg form by reflectors chosen row by row
    from the bottom up.  Returns ``(H, U)`` with ``H = U^H B U`` and
    ``e_m^T U = e_m^T``."""
    B = np.ascontiguousarray(B, dtype=np.complex128)
    if _pick(backend) == "numba":
        return _restore_numba(B)
    return _restore_numpy(B)


def _pick(backend):
    if backend is None:
        return BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not _HAVE_NUMBA:  # pragma: no cover
        return "numpy"
    return backend
