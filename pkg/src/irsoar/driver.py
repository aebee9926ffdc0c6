"""Implicitly restarted GSOAR / refined GSOAR solvers.

Four variants share one loop and differ only in two switches:

============  ================  =====================================
variant       approximations    restart
============  ================  =====================================
IGSOAR        Ritz              all 2f exact shifts + restoration
IRGSOAR       refined Ritz      all 2f refined shifts + restoration
IGSOAR0       Ritz              f exact shifts farthest from target
IRGSOAR0      refined Ritz      f refined shifts farthest from target
============  ================  =====================================
"""
import logging
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gsoar import decomposition_residuals, gsoar_extend, gsoar_start
from .problem import Mode, build_transform
from .restart import implicit_restart
from .ritz import Subspace, check_convergence, refine_pair, ritz_pairs
from .shifts import Strategy, independent_pairs, select_shifts, shift_candidates

log = logging.getLogger(__name__)


class Variant(str, Enum):
    IGSOAR = "igsoar"
    IRGSOAR = "irgsoar"
    IGSOAR0 = "igsoar0"
    IRGSOAR0 = "irgsoar0"

    @property
    def refined(self):
        return self in (Variant.IRGSOAR, Variant.IRGSOAR0)

    @property
    def all_shifts(self):
        return self in (Variant.IGSOAR, Variant.IRGSOAR)


class Status(str, Enum):
    CONVERGED = "converged"
    MAX_RESTARTS = "max_restarts"
    BREAKDOWN = "breakdown"


@dataclass
class SolverConfig:
    """Solver parameters.

    ``m`` is the subspace dimension and ``f`` the number of directions cast
    off per restart, so ``m - f`` vectors are kept.  The ``m - f`` approximate
    eigenvectors nearest the target are protected when shifts are formed;
    ``k_wanted`` of them are tested for convergence and the remaining
    ``l = m - f - k_wanted`` act as a guard band.
    """

    m: int
    f: int
    k_wanted: int = 6
    l: int = None
    tol: float = 1e-10
    max_restarts: int = 100
    variant: Variant = Variant.IRGSOAR
    seed: int = 0
    mode: Mode = Mode.SHIFT_INVERT
    sigma: complex = 0j
    check_invariants: bool = False

    def __post_init__(self):
        self.variant = Variant(self.variant)
        self.mode = Mode(self.mode)
        self.sigma = complex(self.sigma)
        if self.l is None:
            self.l = self.m - self.f - self.k_wanted
        if not (self.k_wanted >= 1 and self.l >= 0 and self.f >= 1):
            raise ValueError(f"need k_wanted >= 1, l >= 0, f >= 1 (got {self})")
        if self.k_wanted + self.l > self.m - self.f or self.m - self.f >= self.m:
            raise ValueError(
                f"need k_wanted + l <= m - f < m, got k={self.k_wanted} l={self.l} "
                f"m={self.m} f={self.f}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    @property
    def keep(self):
        return self.m - self.f


@dataclass
class RestartReport:
    cycle: int
    shifts_used: int
    worst_residual: float
    residuals: list
    ritz_residuals: list
    soar_s: float
    restart_s: float
    find_s: float
    invariant: tuple = None
    invariant_after_restart: tuple = None
    warnings: list = field(default_factory=list)


@dataclass
class SolveResult:
    pairs: list
    history: list
    status: Status
    restarts: int
    variant: Variant
    warnings: int = 0

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    def totals(self):
        soar = sum(h.soar_s for h in self.history)
        restart = sum(h.restart_s for h in self.history)
        find = sum(h.find_s for h in self.history)
        return {"total": soar + restart + find, "soar": soar, "restart": restart, "find": find}


def _random_vector(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def deflation_policy(d, t, coeffs=None, rng=None):
    """Explicit restart that removes deflated (zero) columns of ``Q``.

    The new start is ``u1 = Q_c c``, ``u2 = P_c c`` over the nonzero columns
    ``c`` (default: the first one), re-expanded to the same number of steps.
    Without deflated columns ``d`` is returned unchanged.
    """
    if not any(i < d.j for i in d.deflated):
        return d
    Qc, cols = d.basis()
    c = np.zeros(len(cols), complex) if coeffs is None else np.asarray(coeffs, complex)
    if coeffs is None:
        c[0] = 1.0
    u1 = Qc @ c
    u2 = d.P[:, cols] @ c
    if np.linalg.norm(u2) == 0.0:
        rng = np.random.default_rng() if rng is None else rng
        u2 = _random_vector(rng, d.n)
    fresh = gsoar_start(t, u1, u2)
    return gsoar_extend(fresh, t, d.j)


def solve(problem, cfg, transform=None):
    """Run one variant on ``problem``; see :class:`SolverConfig`."""
    t = transform or build_transform(problem, cfg.mode, cfg.sigma)
    rng = np.random.default_rng(cfg.seed)
    n = problem.n
    if cfg.m > n:
        raise ValueError(f"subspace dimension {cfg.m} exceeds problem size {n}")
    variant = cfg.variant
    strategy = Strategy.ALL_SHIFTS if variant.all_shifts else Strategy.FARTHEST_P
    kind = "refined" if variant.refined else "exact"

    clock = time.perf_counter()
    d = gsoar_start(t, _random_vector(rng, n), _random_vector(rng, n))
    gsoar_extend(d, t, cfg.m)
    soar = time.perf_counter() - clock

    history, restarts, warnings = [], 0, 0
    invariant = decomposition_residuals(d, t) if cfg.check_invariants else None
    while True:
        clock = time.perf_counter()
        Q, _ = d.basis()
        sub = Subspace(problem, t, Q)
        sub.project()
        soar += time.perf_counter() - clock

        clock = time.perf_counter()
        pairs = ritz_pairs(d, t, problem, cfg.k_wanted, subspace=sub)
        ritz_res = [p.residual for p in pairs[:cfg.k_wanted]]
        protect = min(cfg.keep, len(pairs))
        if variant.refined:
            pairs[:protect] = [refine_pair(p, Q, problem, subspace=sub) for p in pairs[:protect]]
        converged, worst = check_convergence(pairs, cfg.tol)
        find = time.perf_counter() - clock

        report = RestartReport(restarts, 0, worst, [p.residual for p in pairs[:cfg.k_wanted]],
                               ritz_res, soar, 0.0, find, invariant)
        history.append(report)
        log.debug("%s cycle %d worst residual %.3e", variant.value, restarts, worst)
        soar = 0.0

        if converged:
            status = Status.CONVERGED
            break
        if d.broke_down:
            status = Status.BREAKDOWN
            break
        if restarts >= cfg.max_restarts:
            status = Status.MAX_RESTARTS
            break

        clock = time.perf_counter()
        if any(i < d.j for i in d.deflated):
            coeffs = sum(p.g for p in pairs[:protect])
            d = deflation_policy(d, t, coeffs, rng)
            warnings += 1
            report.warnings.append("deflated columns removed by explicit restart")
            report.restart_s = time.perf_counter() - clock
        else:
            kept = independent_pairs(pairs, protect)
            find_clock = time.perf_counter()
            shifts = select_shifts(shift_candidates(sub, kept, kind), strategy, p=cfg.f)
            report.find_s += time.perf_counter() - find_clock
            clock = time.perf_counter()
            d, _ = implicit_restart(d, shifts.selected, cfg.keep,
                                    restore=variant.all_shifts, rng=rng)
            report.shifts_used = len(shifts.selected)
            report.restart_s = time.perf_counter() - clock
            if cfg.check_invariants:
                report.invariant_after_restart = decomposition_residuals(d, t)

            clock = time.perf_counter()
            gsoar_extend(d, t, cfg.m)
            soar = time.perf_counter() - clock
        restarts += 1
        if cfg.check_invariants:
            invariant = decomposition_residuals(d, t)

    wanted = [p for p in pairs if p.wanted]
    return SolveResult(wanted, history, status, restarts, variant, warnings)
