"""Explicit (Z^2, N^2)-spaces with conformal measures."""
from .adding_machine import AddingMachine, DyadicPoint, adding_machine, separation_bruteforce
from .base import ModelSystem, SkewPoint, cocycle, injectivity_test, q_embed
from .cone import Cone, cone
from .ratio import RatioHistogram, ratio_set_sampler
from .real_line import RealLine, real_line
from .rotation import RotationII, RotationIII, rotation_type2, rotation_type3
from .transfer import PiecewisePotential, nakada_potential, transfer_density_estimate
from .transport import TransportedModel, transported_adding_machine

__all__ = [
    "AddingMachine", "Cone", "DyadicPoint", "ModelSystem", "PiecewisePotential", "RatioHistogram",
    "RealLine", "RotationII", "RotationIII", "SkewPoint", "TransportedModel", "adding_machine",
    "cocycle", "cone", "injectivity_test", "nakada_potential", "q_embed", "ratio_set_sampler",
    "real_line", "rotation_type2", "rotation_type3", "separation_bruteforce",
    "transfer_density_estimate", "transported_adding_machine",
]
