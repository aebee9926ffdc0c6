"""Implicitly restarted generalized second-order Arnoldi solvers for
quadratic eigenvalue problems ``(lambda^2 M + lambda C + K) x = 0``."""
from .driver import SolveResult, SolverConfig, Status, Variant, solve
from .errors import IrsoarError
from .generators import EXAMPLES, gen_example_41, gen_example_42, gen_example_43
from .problem import Mode, QepProblem, build_transform, read_qep, relative_residual, write_qep

__all__ = [
    "EXAMPLES", "IrsoarError", "Mode", "QepProblem", "SolveResult", "SolverConfig",
    "Status", "Variant", "build_transform", "gen_example_41", "gen_example_42",
    "gen_example_43", "read_qep", "relative_residual", "solve", "write_qep",
]
__version__ = "0.1.0"
