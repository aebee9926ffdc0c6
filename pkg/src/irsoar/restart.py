"""Implicit restarting of a GSOAR decomposition.

The shifted QR sweeps act on ``T_m``; the residual row ``b`` (initially
``t_{m+1,m} e_m^T``) picks up one extra nonzero per sweep.  With at most
``m - k`` shifts the first ``k`` columns can be kept as is.  With more shifts
``b`` is rotated back onto ``e_m^T`` by a Householder reflector and the
matrix is brought back to Hessenberg form by a chain of reflectors that never
touch the last coordinate, after which any leading block can be kept.
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dense import DROP_TOL, householder_to_last, shifted_qr_sweep
from .errors import InvalidTruncation, ZeroResidualRow, ZeroVector
from .gsoar import GsoarDecomposition

FILL_TOL = 1e-12


@dataclass
class SweptState:
    T: np.ndarray
    b: np.ndarray
    Vacc: np.ndarray
    t_last: complex


@dataclass
class RestoredState:
    T: np.ndarray
    W: np.ndarray
    b_last: complex


def apply_shifts(T0, t_last, shifts):
    """One shifted QR sweep per shift, in the given order."""
    T = np.array(T0, dtype=np.complex128)
    m = T.shape[0]
    b = np.zeros(m, dtype=np.complex128)
    b[-1] = t_last
    Vacc = np.eye(m, dtype=np.complex128)
    for mu in shifts:
        T, b, V = shifted_qr_sweep(T, b, mu)
        Vacc = Vacc @ V
    return SweptState(T, b, Vacc, complex(t_last))


def restore_hessenberg(state, scale=None):
    """Unitary ``W`` with ``b W = b_last e_m^T`` and ``W^H T W`` upper Hessenberg.

    First a reflector ``W1`` built from ``b^H`` moves the residual row onto the
    last coordinate; then rows ``m, m-1, ..., 3`` are reduced in turn by
    reflectors acting on the leading columns only.  ``|b_last| = ||b||``.
    """
    T = np.asarray(state.T, dtype=np.complex128)
    b = np.asarray(state.b, dtype=np.complex128)
    if scale is None:
        scale = np.linalg.norm(T) + abs(state.t_last)
    try:
        W1, alpha = householder_to_last(b.conj(), scale=scale)
    except ZeroVector as exc:
        raise ZeroResidualRow(str(exc)) from exc
    B = W1.apply(W1.apply(T).conj().T).conj().T  # W1 T W1, W1 Hermitian
    H, U = _kernels.restore_chain(B)
    W = W1.apply(U)
    return RestoredState(H, W, complex(np.conj(alpha)))


def truncate(d, T, V, b, keep, rng=None):
    """Keep the first ``keep`` columns of the transformed decomposition.

    ``H [Q;P] V = [Q;P] V T + [q_{m+1}; p_{m+1}] b`` must hold with ``T``
    upper Hessenberg.  Residual-row entries before column ``keep`` must vanish;
    otherwise the kept columns do not form a GSOAR decomposition.
    """
    m = d.j
    if not 0 < keep < m:
        raise ValueError(f"keep must lie in 1..{m - 1}, got {keep}")
    b = np.asarray(b, dtype=np.complex128)
    nb = np.linalg.norm(b)
    if nb > 0 and np.max(np.abs(b[:keep - 1]), initial=0.0) > FILL_TOL * nb:
        raise InvalidTruncation(
            f"residual row has fill-in before column {keep}; too many shifts for this truncation")

    Qm, Pm = d.Q[:, :m], d.P[:, :m]
    Vk = V[:, :keep + 1]
    Qn = np.zeros((d.n, keep + 1), dtype=np.complex128)
    Pn = np.zeros_like(Qn)
    Qn[:, :keep] = Qm @ Vk[:, :keep]
    Pn[:, :keep] = Pm @ Vk[:, :keep]
    fq = T[keep, keep - 1] * (Qm @ Vk[:, keep]) + b[keep - 1] * d.Q[:, m]
    fp = T[keep, keep - 1] * (Pm @ Vk[:, keep]) + b[keep - 1] * d.P[:, m]

    Tn = np.zeros((keep + 1, keep), dtype=np.complex128)
    Tn[:keep, :keep] = T[:keep, :keep]
    nq, npn = np.linalg.norm(fq), np.linalg.norm(fp)
    scale = max(d.rmax, np.linalg.norm(T), 1e-300)
    deflated = set()
    if nq > DROP_TOL * scale:
        Tn[keep, keep - 1] = nq
        Qn[:, keep] = fq / nq
        Pn[:, keep] = fp / nq
    elif npn > DROP_TOL * scale:
        Tn[keep, keep - 1] = 1.0
        Pn[:, keep] = fp
        deflated.add(keep)
    else:
        # invariant subspace: any new direction orthogonal to Q_k continues the run
        rng = np.random.default_rng() if rng is None else rng
        q = rng.standard_normal(d.n) + 1j * rng.standard_normal(d.n)
        for _ in range(2):
            q -= Qn[:, :keep] @ (Qn[:, :keep].conj().T @ q)
        Qn[:, keep] = q / np.linalg.norm(q)
    return GsoarDecomposition(Qn, Pn, Tn, deflated, d.rmax)


def implicit_restart(d, shifts, keep, restore=True, rng=None):
    """Apply ``shifts`` to ``d`` and truncate to ``keep`` steps.

    ``restore=False`` is the classical path and only admits
    ``len(shifts) <= m - keep``.  Returns the new decomposition and the swept
    state (for diagnostics).
    """
    m = d.j
    Tm = d.T[:m, :m]
    state = apply_shifts(Tm, d.T[m, m - 1], shifts)
    T, V, b = state.T, state.Vacc, state.b
    if restore:
        try:
            r = restore_hessenberg(state)
        except ZeroResidualRow:
            b = np.zeros_like(b)
        else:
            T, V = r.T, V @ r.W
            b = np.zeros_like(b)
            b[-1] = r.b_last
    elif len(shifts) > m - keep:
        raise InvalidTruncation(
            f"{len(shifts)} shifts leave fill-in in the first {keep} columns (limit {m - keep})")
    return truncate(d, T, V, b, keep, rng=rng), state
