"""Joint transmit beamforming, placement and phase-shift design for an
aerial intelligent reflecting surface (AIRS) serving a ground area."""

from airs.scenario import (
    AreaGrid,
    ConfigError,
    GroundPoint,
    Placement,
    ScenarioConfig,
    db_to_linear,
    linear_to_db,
    make_grid,
)
from airs.placement import SolveResult
from airs.pipeline import SweepResult, SweepSpec, run_sweep, solve

__all__ = [
    "AreaGrid",
    "ConfigError",
    "GroundPoint",
    "Placement",
    "ScenarioConfig",
    "SolveResult",
    "SweepResult",
    "SweepSpec",
    "db_to_linear",
    "linear_to_db",
    "make_grid",
    "run_sweep",
    "solve",
]

__version__ = "0.1.0"
