import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from irsoar.problem import QepProblem


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hessenberg(rng, m):
    return np.triu(crandn(rng, m, m), -1)


def random_qep(rng, n, density=None):
    """Dense-able random QEP with a well-conditioned M."""
    M = np.eye(n) + 0.1 * crandn(rng, n, n)
    C = crandn(rng, n, n)
    K = crandn(rng, n, n)
    return QepProblem(sp.csr_matrix(M), sp.csr_matrix(C), sp.csr_matrix(K))


def dense_qep_eigs(problem):
    """All 2n eigenvalues from the first companion linearization."""
    M, C, K = (X.toarray() for X in (problem.M, problem.C, problem.K))
    n = M.shape[0]
    A = np.block([[-C, -K], [np.eye(n), np.zeros((n, n))]])
    B = np.block([[M, np.zeros((n, n))], [np.zeros((n, n)), np.eye(n)]])
    return scipy.linalg.eigvals(A, B)


def spectra_match(a, b, tol):
    """Greedy matching distance between two eigenvalue multisets."""
    a, b = list(np.asarray(a)), list(np.asarray(b))
    if len(a) != len(b):
        return np.inf
    worst = 0.0
    for x in a:
        j = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b.pop(j)))
    return worst


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
