import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from irsoar.errors import InvalidTruncation, ZeroResidualRow
from irsoar.gsoar import decomposition_residuals, gsoar_extend, gsoar_start, orthonormality_error
from irsoar.problem import Mode, build_transform
from irsoar.restart import (SweptState, apply_shifts, implicit_restart, restore_hessenberg,
                            truncate)
from conftest import crandn, random_hessenberg, random_qep, spectra_match


def restored_checks(T0, b, r):
    m = T0.shape[0]
    nT = np.linalg.norm(T0)
    assert np.linalg.norm(np.tril(r.T, -2)) <= 1e-12 * nT
    assert np.linalg.norm(r.W.conj().T @ r.W - np.eye(m)) <= 1e-12 * np.sqrt(m)
    e = np.zeros(m, complex)
    e[-1] = r.b_last
    assert np.linalg.norm(b @ r.W - e) <= 1e-12 * np.linalg.norm(b)
    assert abs(abs(r.b_last) - np.linalg.norm(b)) <= 1e-12 * np.linalg.norm(b)
    assert np.linalg.norm(r.W.conj().T @ T0 @ r.W - r.T) <= 1e-11 * nT
    assert spectra_match(np.linalg.eigvals(r.T), np.linalg.eigvals(T0), 0) <= 1e-10 * nT


def test_zero_shifts_identity(rng):
    T = random_hessenberg(rng, 6)
    s = apply_shifts(T, 0.7, [])
    assert np.allclose(s.T, T) and np.allclose(s.Vacc, np.eye(6))
    assert np.allclose(s.b, 0.7 * np.eye(6)[-1])


@pytest.mark.parametrize("j", [1, 2, 3, 4, 5, 6])
def test_fill_in_pattern(j, rng):
    m = 8
    s = apply_shifts(random_hessenberg(rng, m), 1.3, crandn(rng, j))
    assert np.max(np.abs(s.b[:m - j - 1]), initial=0) <= 1e-13 * np.linalg.norm(s.b)
    assert np.linalg.norm(s.Vacc.conj().T @ s.Vacc - np.eye(m)) <= 1e-12


def test_exact_eigenvalue_shifts(rng):
    T0 = random_hessenberg(rng, 5)
    w = np.linalg.eigvals(T0)
    s = apply_shifts(T0, 1.0, w)
    assert spectra_match(np.linalg.eigvals(s.T), w, 0) <= 1e-10 * np.linalg.norm(T0)
    assert np.linalg.norm(s.Vacc.conj().T @ T0 @ s.Vacc - s.T) <= 1e-10 * np.linalg.norm(T0)


def test_restore_trivial(rng):
    T = random_hessenberg(rng, 6)
    b = np.eye(6)[-1].astype(complex) * 2
    r = restore_hessenberg(SweptState(T, b, np.eye(6), 2.0))
    assert np.allclose(np.abs(r.W), np.eye(6), atol=1e-13)
    assert np.allclose(np.abs(r.T), np.abs(T), atol=1e-13)


def test_restore_random_m4(rng):
    T = crandn(rng, 4, 4)
    b = crandn(rng, 4)
    restored_checks(T, b, restore_hessenberg(SweptState(T, b, np.eye(4), 1.0)))


def test_restore_worked_m3():
    T = np.array([[1, 2, 3], [4, 5, 6], [7, 8, 9]], dtype=complex)
    b = np.ones(3, complex)
    r = restore_hessenberg(SweptState(T, b, np.eye(3), 1.0))
    assert abs(abs(r.b_last) - np.sqrt(3)) <= 1e-14
    assert abs(r.T[2, 0]) <= 1e-14
    restored_checks(T, b, r)


def test_restore_zero_row(rng):
    with pytest.raises(ZeroResidualRow):
        restore_hessenberg(SweptState(crandn(rng, 4, 4), np.zeros(4), np.eye(4), 0.0))


@settings(max_examples=60, deadline=None)
@given(m=st.integers(3, 40), seed=st.integers(0, 2**31 - 1))
def test_property_restoration(m, seed):
    rng = np.random.default_rng(seed)
    T = random_hessenberg(rng, m)
    s = apply_shifts(T, 1.0, crandn(rng, int(rng.integers(1, 2 * m))))
    restored_checks(s.T, s.b, restore_hessenberg(s))


def _decomposition(rng, n=20, m=10, sigma=0.25):
    p = random_qep(rng, n)
    t = build_transform(p, Mode.SHIFT_INVERT, sigma)
    d = gsoar_start(t, crandn(rng, n), crandn(rng, n))
    gsoar_extend(d, t, m)
    return p, t, d


def test_truncate_without_shifts_drops_last_column(rng):
    _, t, d = _decomposition(rng)
    m = d.j
    new, _ = implicit_restart(d, [], m - 1, restore=False)
    assert np.allclose(new.Q, d.Q[:, :m])
    assert np.allclose(new.T, d.T[:m, :m - 1])


def test_full_pipeline_many_shifts(rng):
    _, t, d = _decomposition(rng)
    new, _ = implicit_restart(d, crandn(rng, 12), 4, restore=True)
    assert new.j == 4
    top, bottom = decomposition_residuals(new, t)
    assert top <= 1e-10 and bottom <= 1e-10
    assert orthonormality_error(new) <= 1e-12
    assert new.T[4, 3].imag == 0 and new.T[4, 3].real >= 0
    gsoar_extend(new, t, 10)
    top, bottom = decomposition_residuals(new, t)
    assert top <= 1e-10 and bottom <= 1e-10


def test_baseline_truncation(rng):
    _, t, d = _decomposition(rng)
    shifts = crandn(rng, 6)
    new, state = implicit_restart(d, shifts, 4, restore=False)
    top, bottom = decomposition_residuals(new, t)
    assert top <= 1e-10 and bottom <= 1e-10
    with pytest.raises(InvalidTruncation):
        implicit_restart(d, crandn(rng, 7), 4, restore=False)
    with pytest.raises(InvalidTruncation):
        truncate(d, state.T, state.Vacc, state.b, 5)


def test_filter_property(rng):
    _, t, d = _decomposition(rng)
    m = d.j
    shifts = crandn(rng, 5)
    new, _ = implicit_restart(d, shifts, m - 5, restore=False)
    Tm = d.T[:m, :m]
    psi = np.eye(m, dtype=complex)
    for mu in shifts:
        psi = psi @ (Tm - mu * np.eye(m))
    target = d.Q[:, :m] @ psi[:, 0]
    angle = scipy.linalg.subspace_angles(new.Q[:, :1], target[:, None])[0]
    assert angle <= 1e-8


def test_restoration_returns_leading_basis(rng):
    # Sweeps followed by restoration compose to a unitary X with X^H T X
    # Hessenberg and e_m^T X parallel to e_m^T; for unreduced T this pins X to a
    # diagonal phase matrix, so the kept columns span what they spanned before.
    _, t, d = _decomposition(rng)
    for nshift in (3, 7, 14):
        new, _ = implicit_restart(d, crandn(rng, nshift), 6, restore=True)
        angles = scipy.linalg.subspace_angles(new.Q[:, :6], d.Q[:, :6])
        assert np.max(angles) <= 1e-8


def test_truncate_rejects_bad_keep(rng):
    _, t, d = _decomposition(rng)
    with pytest.raises(ValueError):
        truncate(d, d.T[:10, :10], np.eye(10), np.zeros(10), 10)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), keep=st.integers(2, 8), extra=st.integers(0, 10))
def test_property_restart_invariant(seed, keep, extra):
    rng = np.random.default_rng(seed)
    _, t, d = _decomposition(rng)
    nshift = 10 - keep + extra
    new, _ = implicit_restart(d, crandn(rng, nshift), keep, restore=True, rng=rng)
    top, bottom = decomposition_residuals(new, t)
    assert top <= 1e-10 and bottom <= 1e-10
