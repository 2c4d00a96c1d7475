"""Bandit-driven channel and spreading-factor selection for LoRa, plus a desk-scale uplink simulator."""
from __future__ import annotations

__version__ = "0.1.0"

from .airtime import InterferenceKernel, time_on_air
from .bandit import JointSelector, make_bandit
from .metrics import MetricsRecord, fairness, fsr
from .scenario import ConfigError, ScenarioConfig, builtin, load_config
from .simcore import run_simulation

__all__ = [
    "__version__",
    "ConfigError",
    "InterferenceKernel",
    "JointSelector",
    "MetricsRecord",
    "ScenarioConfig",
    "builtin",
    "fairness",
    "fsr",
    "load_config",
    "make_bandit",
    "run_simulation",
    "time_on_air",
]
