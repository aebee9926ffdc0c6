"""Benchmark QEPs and their default solver parameters."""
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .problem import QepProblem


def _tridiag(n, lower, diag, upper):
    return sp.diags([lower, diag, upper], [-1, 0, 1], shape=(n, n), format="csr",
                    dtype=np.complex128)


def _unit(q, i):
    e = sp.lil_matrix((q, q), dtype=np.complex128)
    e[i, i] = 1.0
    return e.tocsr()


def gen_example_41(q=90, xi=1.0):
    """Damped acoustic wave problem on a ``(q-1) x q`` grid, mesh size ``1/q``."""
    h = 1.0 / q
    Iq = sp.identity(q, dtype=np.complex128, format="csr")
    Iq1 = sp.identity(q - 1, dtype=np.complex128, format="csr")
    Eq = _unit(q, q - 1)
    Dq = _tridiag(q, -1.0, 4.0, -1.0) - 2.0 * Eq
    Tq1 = _tridiag(q - 1, 1.0, 0.0, 1.0)
    M = -4.0 * np.pi ** 2 * h ** 2 * sp.kron(Iq1, Iq - 0.5 * Eq)
    C = 2j * np.pi * (h / xi) * sp.kron(Iq1, Eq)
    K = sp.kron(Iq1, Dq) + sp.kron(Tq1, -Iq + 0.5 * Eq)
    return QepProblem(M, C, K)


def gen_example_42(tau=10.0, kappa=5.0, n=5000):
    """``M = I``, ``C = tau * tridiag(-1, 3, -1)``, ``K = kappa * tridiag(-1, 3, -1)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    S = _tridiag(n, -1.0, 3.0, -1.0)
    return QepProblem(sp.identity(n, dtype=np.complex128, format="csr"), tau * S, kappa * S)


def gen_example_43(n=5000):
    """``M = I`` with nonsymmetric tridiagonal ``C`` and ``K``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    dc = np.full(n, 12.0)
    dc[[0, -1]] = 8.0
    dk = np.full(n, 3.0)
    dk[[0, -1]] = 2.0
    C = _tridiag(n, np.full(n - 1, 2.0), dc, np.full(n - 1, -4.0))
    K = _tridiag(n, np.full(n - 1, -1.0), dk, np.full(n - 1, 2.0))
    return QepProblem(sp.identity(n, dtype=np.complex128, format="csr"), C, K)


@dataclass(frozen=True)
class ExampleSpec:
    id: str
    n: int
    m: int
    f: int
    sigma: complex
    k_wanted: int = 6
    tol: float = 1e-10
    mode: str = "shiftinvert"

    def build(self, **overrides):
        if self.id == "ex41":
            return gen_example_41(**overrides)
        if self.id.startswith("ex42"):
            return gen_example_42(n=self.n, **overrides)
        return gen_example_43(n=self.n, **overrides)


EXAMPLES = {
    "ex41": ExampleSpec("ex41", 8010, 12, 5, 0j),
    "ex42a": ExampleSpec("ex42a", 5000, 40, 28, -13 + 0.4j),
    "ex42b": ExampleSpec("ex42b", 5000, 40, 30, -13 + 0.4j),
    "ex43a": ExampleSpec("ex43a", 5000, 26, 15, -10 - 0.8j),
    "ex43b": ExampleSpec("ex43b", 5000, 26, 13, -10 - 0.8j),
}
