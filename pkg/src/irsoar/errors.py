"""Exception hierarchy."""


class IrsoarError(Exception):
    """Base class for all errors raised by this package."""


class ZeroVector(IrsoarError):
    """A vector that must be reflected or normalised is numerically zero."""


class NoConvergence(IrsoarError):
    """A dense eigenvalue iteration failed to converge."""


class SingularPivot(IrsoarError):
    """Sparse LU of the pivot matrix failed; the target is (nearly) an eigenvalue."""


class ZeroMu(IrsoarError):
    """A transformed eigenvalue is zero, i.e. an infinite original eigenvalue."""


class ZeroStart(IrsoarError):
    """A starting vector for the GSOAR procedure is zero."""


class SingularMassMatrix(IrsoarError):
    """The projected leading coefficient is too ill-conditioned to invert."""


class RankDeficient(IrsoarError):
    """Kept coordinate vectors are linearly dependent."""


class ZeroResidualRow(IrsoarError):
    """The residual row vanished: the current subspace is invariant."""


class InvalidTruncation(IrsoarError):
    """The residual row has fill-in inside the columns that would be kept."""


class InputError(IrsoarError):
    """Bad user input (files, flags, configuration)."""
