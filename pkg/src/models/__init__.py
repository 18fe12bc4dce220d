"""
SFDE Models
===========

Model interface, parameter boxes, history laws and the built-in benchmark.

Usage:
    from src.models import get_model

    model = get_model("benchmark2d")
    model.drift(x, h, theta)
"""

from .base import (
    SFDEModel,
    ParameterBox,
    DeterministicHistory,
    HistorySDE,
    HistoryLaw,
    checked_cholesky,
    PD_TOLERANCE,
)
from .factory import register_model, get_model, list_models
from .benchmark import Benchmark2D, builtin_benchmark

__all__ = [
    "SFDEModel",
    "ParameterBox",
    "DeterministicHistory",
    "HistorySDE",
    "HistoryLaw",
    "checked_cholesky",
    "PD_TOLERANCE",
    "register_model",
    "get_model",
    "list_models",
    "Benchmark2D",
    "builtin_benchmark",
]
