"""Conformal measures, KMS states and model (Z^2, N^2)-spaces for the quarter-plane semigroup algebra."""
from .errors import (DivergentSeries, InsufficientRecurrences, KmsLabError, NoConvergence, PeriodicObstruction,
                     TracialRegime, UncertifiedTail, UnsupportedCylinder, VariantMismatch)
from .lattice import E1, E2, V1, V2, ZERO, GroupElement, Potential, c_value, existence_gate, sl2_transport

__version__ = "0.1.0"

__all__ = [
    "DivergentSeries", "E1", "E2", "GroupElement", "InsufficientRecurrences", "KmsLabError", "NoConvergence",
    "PeriodicObstruction", "Potential", "TracialRegime", "UncertifiedTail", "UnsupportedCylinder", "V1", "V2",
    "VariantMismatch", "ZERO", "c_value", "existence_gate", "sl2_transport",
]
