"""Solar-plus-grid CoMP cellular downlink simulator with inter-BS energy sharing."""

from .engine import LoadMode, RunResult, ScenarioConfig, run_iteration, run_monte_carlo
from .energy import SolarConfig, SpatialMode
from .radio import ChannelParams, CompMode
from .power import PowerModelParams

__all__ = [
    "ChannelParams",
    "CompMode",
    "LoadMode",
    "PowerModelParams",
    "RunResult",
    "ScenarioConfig",
    "SolarConfig",
    "SpatialMode",
    "run_iteration",
    "run_monte_carlo",
]
__version__ = "0.1.0"
