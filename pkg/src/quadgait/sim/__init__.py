from .config import SimConfig
from .terrain import Terrain, generate_platforms
from .engine import QuadrupedSim, DomainParams, StepReport, termination_check

__all__ = [
    "SimConfig",
    "Terrain",
    "generate_platforms",
    "QuadrupedSim",
    "DomainParams",
    "StepReport",
    "termination_check",
]
