import numpy as np
import pytest
import scipy.sparse as sp

from irsoar.driver import SolverConfig, Status, Variant, deflation_policy, solve
from irsoar.generators import gen_example_42
from irsoar.gsoar import decomposition_residuals, gsoar_extend, gsoar_start, orthonormality_error
from irsoar.problem import Mode, QepProblem, build_transform, relative_residual
from conftest import crandn, dense_qep_eigs, random_qep


def test_config_defaults_and_validation():
    cfg = SolverConfig(m=12, f=5)
    assert cfg.l == 1 and cfg.keep == 7
    assert cfg.variant is Variant.IRGSOAR
    with pytest.raises(ValueError):
        SolverConfig(m=12, f=5, l=3)  # 6 + 3 > 7
    with pytest.raises(ValueError):
        SolverConfig(m=12, f=0)
    with pytest.raises(ValueError):
        SolverConfig(m=12, f=5, tol=0)
    with pytest.raises(ValueError):
        SolverConfig(m=12, f=5, variant="arpack")


def test_variant_switches():
    assert Variant.IRGSOAR.refined and Variant.IRGSOAR.all_shifts
    assert not Variant.IGSOAR0.refined and not Variant.IGSOAR0.all_shifts


def test_full_space_converges_immediately(rng):
    p = random_qep(rng, 10)
    cfg = SolverConfig(m=10, f=4, k_wanted=4, sigma=0.2, variant="igsoar")
    res = solve(p, cfg)
    assert res.status is Status.CONVERGED and res.restarts == 0
    ref = dense_qep_eigs(p)
    for pr in res.pairs:
        assert np.min(np.abs(ref - pr.lam)) <= 1e-8 * max(1, abs(pr.lam))


def test_m_larger_than_n_rejected(rng):
    with pytest.raises(ValueError):
        solve(random_qep(rng, 5), SolverConfig(m=8, f=2, k_wanted=4, sigma=0))


@pytest.mark.parametrize("variant", ["igsoar0", "irgsoar0"])
def test_baselines_converge_on_small_problem(variant):
    p = gen_example_42(n=300)
    cfg = SolverConfig(m=20, f=10, k_wanted=4, sigma=-13 + 0.4j, variant=variant,
                       max_restarts=200, check_invariants=True)
    res = solve(p, cfg)
    assert res.converged
    for pr in res.pairs:
        assert relative_residual(p, pr.lam, pr.y) <= cfg.tol
    for h in res.history:
        assert max(h.invariant) <= 1e-10
        if h.invariant_after_restart is not None:
            assert max(h.invariant_after_restart) <= 1e-10
        assert min(h.soar_s, h.restart_s, h.find_s) >= 0


def test_refined_history_not_worse_than_ritz():
    p = gen_example_42(n=300)
    res = solve(p, SolverConfig(m=20, f=10, k_wanted=4, sigma=-13 + 0.4j, variant="irgsoar0",
                                max_restarts=20))
    for h in res.history:
        assert np.all(np.array(h.residuals) <= np.array(h.ritz_residuals) + 1e-12)


def test_all_shift_variants_keep_invariant():
    p = gen_example_42(n=300)
    for v in ("igsoar", "irgsoar"):
        res = solve(p, SolverConfig(m=20, f=10, k_wanted=4, sigma=-13 + 0.4j, variant=v,
                                    max_restarts=5, check_invariants=True))
        assert all(h.shifts_used in (0, 20) for h in res.history)
        for h in res.history[:-1]:
            assert max(h.invariant_after_restart) <= 1e-10


def test_determinism():
    p = gen_example_42(n=200)
    cfg = SolverConfig(m=16, f=8, k_wanted=4, sigma=-13 + 0.4j, variant="igsoar0", max_restarts=8)
    a, b = solve(p, cfg), solve(p, cfg)
    assert [h.worst_residual for h in a.history] == [h.worst_residual for h in b.history]
    assert [pr.lam for pr in a.pairs] == [pr.lam for pr in b.pairs]


def test_deflation_policy_identity(rng):
    p = random_qep(rng, 12)
    t = build_transform(p, Mode.DIRECT)
    d = gsoar_start(t, crandn(rng, 12), crandn(rng, 12))
    gsoar_extend(d, t, 5)
    assert deflation_policy(d, t) is d


def test_deflation_policy_rebuilds():
    n = 6
    E = np.eye(n)
    B = np.eye(n, dtype=complex) + 0.3 * np.diag(np.arange(n))
    B[:, 0] = E[0] + E[2]
    B[:, 1] = E[2]
    prob = QepProblem(sp.eye(n), sp.csr_matrix((n, n)), -sp.csr_matrix(B))
    t = build_transform(prob, Mode.DIRECT)
    d = gsoar_start(t, E[0], E[1])
    gsoar_extend(d, t, 3)
    assert 2 in d.deflated
    fresh = deflation_policy(d, t, coeffs=np.array([1.0, 0.5j]))
    assert orthonormality_error(fresh) <= 1e-12
    assert max(decomposition_residuals(fresh, t)) <= 1e-10


def test_deflation_warnings_are_counted():
    n = 60
    d = np.repeat([1.0, 2.0, 3.0], n // 3)
    p = QepProblem(sp.eye(n), sp.diags(0.5 * d), sp.diags(d))
    res = solve(p, SolverConfig(m=10, f=4, k_wanted=4, sigma=0.1, tol=1e-300, max_restarts=3))
    assert res.warnings >= 1
    assert res.warnings == sum(len(h.warnings) for h in res.history)
