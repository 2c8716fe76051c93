"""Predictable and innovation capacities of noisy driven dynamical systems."""

from . import capacity, geometry, hardness, reservoir, spectral
from .capacity import BasisConfig, CapacityReport, estimate_capacities
from .errors import InnovcapError
from .geometry import capacity_traces, pencil_spectrum, shrinkage_capacities, whitened_geometry
from .reservoir import CovarianceSplit, DuffingConfig, RlcConfig

__version__ = "0.1.0"

__all__ = [
    "capacity",
    "geometry",
    "hardness",
    "reservoir",
    "spectral",
    "BasisConfig",
    "CapacityReport",
    "CovarianceSplit",
    "DuffingConfig",
    "InnovcapError",
    "RlcConfig",
    "capacity_traces",
    "estimate_capacities",
    "pencil_spectrum",
    "shrinkage_capacities",
    "whitened_geometry",
]
