"""Spectral analysis of magnetic Schrödinger operators on armchair nanotube graphs."""

from .errors import (
    ArmchairError,
    ClassificationFailure,
    CountMismatch,
    EvennessRequired,
    GeometryUndefined,
    IntegrationFailure,
    InternalInconsistency,
    NearDirichletSingularity,
    NotAnEigenvalue,
    WrongBranch,
)
from .potential import Potential, load_potential, save_potential

__version__ = "0.1.0"
