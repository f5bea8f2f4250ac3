"""Impinging-jet plate cooling under closed-loop DQN control."""

from .agent import AgentConfig, DQNAgent
from .config import RunConfig, load_run_config
from .env import EnvConfig, ThermalEnv
from .thermal import FluidPlateProps

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "DQNAgent",
    "EnvConfig",
    "FluidPlateProps",
    "RunConfig",
    "ThermalEnv",
    "load_run_config",
    "__version__",
]
