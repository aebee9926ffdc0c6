"""Generalized second-order Arnoldi (GSOAR) procedure with deflation remedy.

A decomposition at step ``j`` satisfies the two block rows

    A Q_j + B P_j = Q_{j+1} T_hat
              Q_j = P_{j+1} T_hat

with ``T_hat`` of shape ``(j+1, j)`` upper Hessenberg and the nonzero columns
of ``Q`` orthonormal.  A zero column of ``Q`` marks a deflation step.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ZeroStart
from .problem import apply_operator

BREAKDOWN_TOL = 1e-12
SPAN_TOL = 1e-10
REORTH_RATIO = 0.707


@dataclass
class GsoarDecomposition:
    Q: np.ndarray
    P: np.ndarray
    T: np.ndarray
    deflated: set = field(default_factory=set)
    rmax: float = 0.0
    broke_down: bool = False

    @property
    def j(self):
        return self.T.shape[1]

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def T_hat(self):
        return self.T

    def basis(self):
        """Nonzero columns of the search space, used for projection.

        After a breakdown the last computed vector closes an invariant
        subspace, so it is included.
        """
        cols = self.j + 1 if self.broke_down else self.j
        keep = [i for i in range(cols) if i not in self.deflated]
        return self.Q[:, keep], keep

    def copy(self):
        return GsoarDecomposition(self.Q.copy(), self.P.copy(), self.T.copy(),
                                  set(self.deflated), self.rmax, self.broke_down)


def gsoar_start(t, u1, u2=None, soar=False):
    """Step-0 decomposition from ``q1 = u1/||u1||`` and ``p1 = u2/||u2||``.

    With ``soar=True`` the second vector is ignored and ``p1 = 0``, which is
    the original SOAR start.
    """
    u1 = np.asarray(u1, dtype=np.complex128)
    n1 = np.linalg.norm(u1)
    if n1 == 0.0:
        raise ZeroStart("u1 is zero")
    Q = (u1 / n1)[:, None].copy()
    if soar:
        P = np.zeros_like(Q)
    else:
        if u2 is None:
            raise ZeroStart("u2 is required unless soar=True")
        u2 = np.asarray(u2, dtype=np.complex128)
        n2 = np.linalg.norm(u2)
        if n2 == 0.0:
            raise ZeroStart("u2 is zero")
        P = (u2 / n2)[:, None].copy()
    return GsoarDecomposition(Q, P, np.zeros((1, 0), dtype=np.complex128))


def gsoar_extend(d, t, target_steps):
    """Advance ``d`` in place to ``target_steps`` steps (or to breakdown)."""
    j0 = d.j
    if target_steps <= j0 or d.broke_down:
        return d
    n = d.n
    Q = np.zeros((n, target_steps + 1), dtype=np.complex128)
    P = np.zeros_like(Q)
    T = np.zeros((target_steps + 1, target_steps), dtype=np.complex128)
    Q[:, :j0 + 1] = d.Q
    P[:, :j0 + 1] = d.P
    T[:j0 + 1, :j0] = d.T

    for j in range(j0, target_steps):
        r = apply_operator(t, Q[:, j], P[:, j])
        s = Q[:, j].copy()
        r0 = np.linalg.norm(r)
        d.rmax = max(d.rmax, r0)
        Qj, Pj = Q[:, :j + 1], P[:, :j + 1]
        h = Qj.conj().T @ r
        r -= Qj @ h
        s -= Pj @ h
        rn = np.linalg.norm(r)
        if rn < REORTH_RATIO * r0:
            h2 = Qj.conj().T @ r
            r -= Qj @ h2
            s -= Pj @ h2
            h += h2
            rn = np.linalg.norm(r)
        T[:j + 1, j] = h

        if rn <= BREAKDOWN_TOL * d.rmax:
            if _in_deflated_span(P, d.deflated, s):
                d.broke_down = True
                d.Q, d.P, d.T = Q[:, :j + 1], P[:, :j + 1], T[:j + 1, :j]
                return d
            T[j + 1, j] = 1.0
            P[:, j + 1] = s
            d.deflated.add(j + 1)
        else:
            T[j + 1, j] = rn
            Q[:, j + 1] = r / rn
            P[:, j + 1] = s / rn

    d.Q, d.P, d.T = Q, P, T
    return d


def _in_deflated_span(P, deflated, s):
    ns = np.linalg.norm(s)
    if ns == 0.0:
        return True
    if not deflated:
        return False
    D = P[:, sorted(deflated)]
    c, *_ = np.linalg.lstsq(D, s, rcond=None)
    return np.linalg.norm(s - D @ c) <= SPAN_TOL * ns


def decomposition_residuals(d, t):
    """Relative residuals of both block rows.

    Returns ``(top, bottom)`` each divided by
    ``||T_hat||_F * max(||Q||_F, ||P||_F)``.
    """
    j = d.j
    if j == 0:
        return 0.0, 0.0
    Qj, Pj = d.Q[:, :j], d.P[:, :j]
    top = apply_operator(t, Qj, Pj) - d.Q @ d.T
    bottom = Qj - d.P @ d.T
    scale = np.linalg.norm(d.T) * max(np.linalg.norm(d.Q), np.linalg.norm(d.P))
    scale = scale if scale > 0 else 1.0
    return float(np.linalg.norm(top) / scale), float(np.linalg.norm(bottom) / scale)


def orthonormality_error(d):
    Q, _ = d.basis()
    return float(np.linalg.norm(Q.conj().T @ Q - np.eye(Q.shape[1])))
