"""Exception types raised across the package."""


class ArmchairError(Exception):
    """Base class for all package errors."""


class GeometryUndefined(ArmchairError, ValueError):
    """The nanotube geometry needs N >= 2."""


class IntegrationFailure(ArmchairError, RuntimeError):
    """Step halving did not reach the requested accuracy."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CountMismatch(ArmchairError, RuntimeError):
    """Root counts disagree with the expected pattern after grid refinement."""


class InternalInconsistency(ArmchairError, RuntimeError):
    """A structural relation that must hold was violated numerically."""


class ClassificationFailure(ArmchairError, RuntimeError):
    """A gap endpoint matches none of the known zero sets."""


class NearDirichletSingularity(ArmchairError, RuntimeError):
    """The monodromy matrix is requested too close to a Dirichlet eigenvalue."""


class NotAnEigenvalue(ArmchairError, ValueError):
    """The energy passed to a flat-band construction is not Dirichlet."""


class WrongBranch(ArmchairError, ValueError):
    """Degenerate / non-degenerate flat-band formula applied on the wrong side."""


class EvennessRequired(ArmchairError, ValueError):
    """The operation is only defined for even potentials."""
