"""Rayleigh-Ritz and refined Rayleigh-Ritz extraction on a GSOAR subspace."""
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

import scipy.linalg

from .dense import dense_eig, smallest_right_singular_vector
from .errors import SingularMassMatrix
from .problem import Mode, map_eigenvalue

COND_LIMIT = 1e14
INFINITE_TOL = 1e-13


@dataclass(frozen=True)
class ApproxEigenpair:
    theta: complex
    lam: complex
    g: np.ndarray
    y: np.ndarray
    residual: float
    kind: str = "ritz"
    wanted: bool = False


class Subspace:
    """Products of the QEP coefficients with an orthonormal basis ``Q``.

    ``M Q``, ``C Q`` and ``K Q`` are formed once; projections, residuals and
    refined vectors all reuse them.
    """

    def __init__(self, problem, t, Q):
        self.problem = problem
        self.t = t
        self.Q = np.asarray(Q, dtype=np.complex128)
        self.MQ = problem.M @ self.Q
        self.CQ = problem.C @ self.Q
        self.KQ = problem.K @ self.Q

    @property
    def dim(self):
        return self.Q.shape[1]

    def transformed_products(self):
        """``(Mt Q, Ct Q, Kt Q)`` for the coefficients in the iterated variable."""
        if self.t is None or self.t.mode is Mode.DIRECT:
            return self.MQ, self.CQ, self.KQ
        s = self.t.sigma
        return (s * s * self.MQ + s * self.CQ + self.KQ,
                2 * s * self.MQ + self.CQ,
                self.MQ)

    def project(self, Z=None):
        """Small coefficients ``W^H Xt W`` with ``W = Q Z`` (``Z = I`` by default)."""
        Qh = self.Q.conj().T
        mats = [Qh @ X for X in self.transformed_products()]
        if Z is None:
            return tuple(mats)
        return tuple(Z.conj().T @ X @ Z for X in mats)

    def residuals(self, lams, G):
        """Relative residuals of ``(lam_i, Q g_i / ||g_i||)`` for columns of ``G``."""
        lams = np.asarray(lams, dtype=np.complex128)
        G = np.asarray(G, dtype=np.complex128)
        G = G / np.linalg.norm(G, axis=0)
        R = lams ** 2 * (self.MQ @ G) + lams * (self.CQ @ G) + self.KQ @ G
        p = self.problem
        a = np.abs(lams)
        return np.linalg.norm(R, axis=0) / (a * a * p.normM + a * p.normC + p.normK)

    @cached_property
    def _stacked_r(self):
        # thin-QR triangle of [MQ, CQ, KQ]; singular values of any
        # lam^2 MQ + lam CQ + KQ are those of R [lam^2 I; lam I; I]
        X = np.hstack([self.MQ, self.CQ, self.KQ])
        return np.linalg.qr(X, mode="r")

    def refined_coordinates(self, lam):
        s = self.dim
        I = np.eye(s, dtype=np.complex128)
        S = self._stacked_r @ np.vstack([lam * lam * I, lam * I, I])
        return smallest_right_singular_vector(S)


def project_qep(problem, t, Q):
    """``(Q^H Mt Q, Q^H Ct Q, Q^H Kt Q)`` in the iterated variable."""
    return Subspace(problem, t, Q).project()


def solve_small_qep(Ms, Cs, Ks):
    """All finite eigenpairs of ``theta^2 Ms + theta Cs + Ks``.

    Uses the companion form ``[[-Ms^-1 Cs, -Ms^-1 Ks], [I, 0]]``.  Returns
    ``(thetas, G)`` with unit columns ``G``.
    """
    Ms, Cs, Ks = (np.atleast_2d(np.asarray(X, dtype=np.complex128)) for X in (Ms, Cs, Ks))
    s = Ms.shape[0]
    if np.linalg.cond(Ms) > COND_LIMIT:
        raise SingularMassMatrix("projected leading coefficient is numerically singular")
    L = np.zeros((2 * s, 2 * s), dtype=np.complex128)
    L[:s, :s] = -np.linalg.solve(Ms, Cs)
    L[:s, s:] = -np.linalg.solve(Ms, Ks)
    L[s:, :s] = np.eye(s)
    w, X = dense_eig(L)
    top, bottom = X[:s], X[s:]
    ntop = np.linalg.norm(top, axis=0)
    nbot = np.linalg.norm(bottom, axis=0)
    finite = nbot > INFINITE_TOL * ntop
    # the top block is theta * g; it carries g more accurately when |theta| > 1
    use_top = np.abs(w) > 1.0
    G = np.where(use_top, top / np.where(w == 0, 1, w), bottom)
    G = G[:, finite]
    G = G / np.linalg.norm(G, axis=0)
    return w[finite], G


def solve_small_qep_pencil(Ms, Cs, Ks):
    """Like :func:`solve_small_qep` but via QZ on ``[[-Cs, -Ks], [I, 0]] - theta diag(Ms, I)``.

    Needs no inverse of ``Ms``; infinite eigenvalues from a singular ``Ms``
    are dropped.
    """
    Ms, Cs, Ks = (np.atleast_2d(np.asarray(X, dtype=np.complex128)) for X in (Ms, Cs, Ks))
    s = Ms.shape[0]
    I, Z = np.eye(s), np.zeros((s, s))
    L = np.block([[-Cs, -Ks], [I, Z]])
    R = np.block([[Ms, Z], [Z, I]])
    ab, X = scipy.linalg.eig(L, R, homogeneous_eigvals=True)
    alpha, beta = ab
    scale = np.maximum(np.abs(alpha), np.abs(beta))
    finite = np.abs(beta) > INFINITE_TOL * scale
    w = alpha[finite] / beta[finite]
    X = X[:, finite]
    top, bottom = X[:s], X[s:]
    use_top = np.abs(w) > 1.0
    G = np.where(use_top, top / np.where(w == 0, 1, w), bottom)
    G = G / np.linalg.norm(G, axis=0)
    return w, G


def small_qep(Ms, Cs, Ks):
    """Companion solve, falling back to QZ when ``Ms`` is too ill-conditioned."""
    try:
        return solve_small_qep(Ms, Cs, Ks)
    except SingularMassMatrix:
        return solve_small_qep_pencil(Ms, Cs, Ks)


def _order(t, lams):
    lams = np.asarray(lams)
    if t.mode is Mode.DIRECT:
        primary = -np.abs(lams)
    else:
        primary = np.abs(lams - t.sigma)
    return np.lexsort((lams.imag, lams.real, primary))


def ritz_pairs(d, t, problem, how_many, subspace=None):
    """All Ritz pairs of the current subspace ordered by closeness to the target.

    Shift-invert mode ranks by ``|lambda - sigma|`` ascending, direct mode by
    ``|lambda|`` descending; ties go to the smaller real, then imaginary part.
    The first ``how_many`` pairs carry ``wanted=True``.
    """
    if subspace is None:
        Q, _ = d.basis()
        subspace = Subspace(problem, t, Q)
    thetas, G = small_qep(*subspace.project())
    keep = thetas != 0 if t.mode is Mode.SHIFT_INVERT else np.ones(len(thetas), bool)
    thetas, G = thetas[keep], G[:, keep]
    lams = np.array([map_eigenvalue(t, th) for th in thetas], dtype=np.complex128)
    order = _order(t, lams)
    thetas, G, lams = thetas[order], G[:, order], lams[order]
    res = subspace.residuals(lams, G)
    Y = subspace.Q @ G
    Y = Y / np.linalg.norm(Y, axis=0)
    return [
        ApproxEigenpair(complex(thetas[i]), complex(lams[i]), G[:, i], Y[:, i],
                        float(res[i]), "ritz", i < how_many)
        for i in range(len(thetas))
    ]


def refine_pair(pair, Q, problem, subspace=None):
    """Refined Ritz vector for ``pair``: the unit ``u`` in span(Q) minimising
    ``||(lam^2 M + lam C + K) u||`` at the pair's eigenvalue."""
    if subspace is None:
        subspace = Subspace(problem, None, Q)
    _, z = subspace.refined_coordinates(pair.lam)
    res = subspace.residuals([pair.lam], z[:, None])[0]
    y = subspace.Q @ z
    return replace(pair, g=z, y=y / np.linalg.norm(y), residual=float(res), kind="refined")


def check_convergence(pairs, tol):
    """``(converged, worst)`` over the wanted pairs."""
    wanted = [p.residual for p in pairs if p.wanted]
    if not wanted:
        raise ValueError("no wanted pairs to test")
    worst = max(wanted)
    return worst <= tol, worst

