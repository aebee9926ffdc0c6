"""Sparse quadratic eigenvalue problems and the spectral transformation that
turns them into the operator pair (A, B) iterated by GSOAR."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import InputError, SingularPivot, ZeroMu

PIVOT_TOL = 1e-13


class Mode(str, Enum):
    DIRECT = "direct"
    SHIFT_INVERT = "shiftinvert"


@dataclass(frozen=True)
class QepProblem:
    """``(lambda^2 M + lambda C + K) x = 0`` with sparse ``n x n`` coefficients.

    Matrices are stored as complex CSR; Frobenius norms are computed once.
    """

    M: sp.csr_matrix
    C: sp.csr_matrix
    K: sp.csr_matrix
    normM: float = field(init=False)
    normC: float = field(init=False)
    normK: float = field(init=False)

    def __post_init__(self):
        mats = [sp.csr_matrix(X, dtype=np.complex128) for X in (self.M, self.C, self.K)]
        shapes = {X.shape for X in mats}
        if len(shapes) != 1:
            raise ValueError(f"M, C, K must share one shape, got {sorted(shapes)}")
        (shape,) = shapes
        if shape[0] != shape[1]:
            raise ValueError(f"coefficients must be square, got {shape}")
        for name, X in zip("MCK", mats):
            if not np.all(np.isfinite(X.data)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, X)
            object.__setattr__(self, "norm" + name, float(spla.norm(X, "fro")))

    @property
    def n(self):
        return self.M.shape[0]

    def apply(self, lam, Y):
        """``(lam^2 M + lam C + K) Y``."""
        return lam * lam * (self.M @ Y) + lam * (self.C @ Y) + self.K @ Y

    def scale(self, lam):
        a = abs(lam)
        return a * a * self.normM + a * self.normC + self.normK


@dataclass(frozen=True)
class SpectralTransform:
    """Operator pair ``A = -Mt^{-1} Ct``, ``B = -Mt^{-1} Kt``.

    ``(Mt, Ct, Kt)`` are the coefficients of the QEP in the iterated variable
    ``mu``.  Direct mode keeps ``(M, C, K)`` and ``mu = lambda``.  Shift-invert
    mode substitutes ``lambda = sigma + 1/mu`` which gives
    ``(K_sigma, 2 sigma M + C, M)`` with ``K_sigma = sigma^2 M + sigma C + K``;
    eigenvalues nearest ``sigma`` become the largest ``|mu|``.
    """

    mode: Mode
    sigma: complex
    Mt: sp.csc_matrix
    Ct: sp.csr_matrix
    Kt: sp.csr_matrix
    lu: object

    def apply_A(self, v):
        return -self._solve(self.Ct @ v)

    def apply_B(self, v):
        return -self._solve(self.Kt @ v)

    def _solve(self, rhs):
        return self.lu.solve(np.asarray(rhs, dtype=np.complex128))


def build_transform(problem, mode=Mode.SHIFT_INVERT, sigma=None):
    mode = Mode(mode)
    M, C, K = problem.M, problem.C, problem.K
    if mode is Mode.DIRECT:
        sigma = 0j if sigma is None else complex(sigma)
        pivot, Ct, Kt = M, C, K
    else:
        if sigma is None:
            raise ValueError("shift-invert mode needs a target sigma")
        sigma = complex(sigma)
        pivot = sigma * sigma * M + sigma * C + K
        Ct = (2 * sigma * M + C).tocsr()
        Kt = M
    pivot = sp.csc_matrix(pivot, dtype=np.complex128)
    lu = _factor(pivot)
    return SpectralTransform(mode, sigma, pivot, Ct, Kt, lu)


def _factor(pivot):
    try:
        lu = spla.splu(pivot)
    except RuntimeError as exc:
        raise SingularPivot(f"pivot matrix is singular: {exc}") from exc
    d = np.abs(lu.U.diagonal())
    if d.size == 0 or d.max() == 0.0 or d.min() <= PIVOT_TOL * d.max():
        raise SingularPivot("pivot matrix is numerically singular; perturb sigma")
    return lu


def apply_operator(t, q, p):
    """``A q + B p`` with a single triangular solve.  Works column-wise on blocks."""
    return -t._solve(t.Ct @ q + t.Kt @ p)


def map_eigenvalue(t, mu):
    if t.mode is Mode.DIRECT:
        return complex(mu)
    if mu == 0:
        raise ZeroMu("zero transformed eigenvalue (infinite lambda)")
    return t.sigma + 1.0 / complex(mu)


def to_transformed(t, lam):
    """Inverse of :func:`map_eigenvalue`."""
    if t.mode is Mode.DIRECT:
        return complex(lam)
    return 1.0 / (complex(lam) - t.sigma)


def relative_residual(problem, lam, y):
    """``||Q(lam) y|| / (|lam|^2 ||M||_F + |lam| ||C||_F + ||K||_F)``."""
    r = problem.apply(lam, np.asarray(y, dtype=np.complex128))
    return float(np.linalg.norm(r) / problem.scale(lam))


def read_matrix_market(path):
    try:
        A = scipy.io.mmread(str(path))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read Matrix Market file {path}: {exc}") from exc
    if not sp.issparse(A):
        A = sp.csr_matrix(A)
    return sp.csr_matrix(A, dtype=np.complex128)


def read_qep(m_path, c_path, k_path):
    mats = [read_matrix_market(p) for p in (m_path, c_path, k_path)]
    try:
        return QepProblem(*mats)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def write_qep(problem, m_path, c_path, k_path):
    for X, path in zip((problem.M, problem.C, problem.K), (m_path, c_path, k_path)):
        scipy.io.mmwrite(str(path), sp.coo_matrix(X))
