"""
Core Module
===========

Configuration and the exception hierarchy shared by every subpackage.
"""

from .config import (
    Config,
    BoxConfig,
    DelayConfig,
    SimulationConfig,
    ExperimentConfig,
    OutputConfig,
    LoggingConfig,
)
from .exceptions import (
    SFDEError,
    ConfigurationError,
    ValidationError,
    DomainError,
    NumericalError,
    ModelViolationError,
    SimulationDivergedError,
    NonFiniteError,
    OptimizationFailedError,
    InformationMatrixError,
    ExperimentDegenerateError,
)

__all__ = [
    # Configuration
    "Config",
    "BoxConfig",
    "DelayConfig",
    "SimulationConfig",
    "ExperimentConfig",
    "OutputConfig",
    "LoggingConfig",
    # Exceptions
    "SFDEError",
    "ConfigurationError",
    "ValidationError",
    "DomainError",
    "NumericalError",
    "ModelViolationError",
    "SimulationDivergedError",
    "NonFiniteError",
    "OptimizationFailedError",
    "InformationMatrixError",
    "ExperimentDegenerateError",
]
