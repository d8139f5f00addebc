"""Gaudin magnets, the q-deformed Gaudin algebra and their numerical verification."""

from .algebra import Realization, RealizationKind
from .couplings import CouplingFamily, Family
from .errors import (
    DegenerateStateError,
    DimensionError,
    DomainError,
    GaudinError,
    PoleError,
    SimultaneousDiagonalizationError,
    UnsupportedFamilyError,
)
from .magnet import MagnetSet, build_magnets
from .spin import SpinSystem

__all__ = [
    "CouplingFamily",
    "DegenerateStateError",
    "DimensionError",
    "DomainError",
    "Family",
    "GaudinError",
    "MagnetSet",
    "PoleError",
    "Realization",
    "RealizationKind",
    "SimultaneousDiagonalizationError",
    "SpinSystem",
    "UnsupportedFamilyError",
    "build_magnets",
]
