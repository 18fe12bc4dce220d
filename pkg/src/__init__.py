"""
SFDE Toolkit
============

Simulation and small-noise parameter estimation for stochastic functional
delay equations

    dX_t = b(X_t, H(X_{t-.}), alpha) dt + eps * sigma(X_t, H(X_{t-.}), beta) dW_t

observed on the grid t_k = k/n of [0, 1].

Features:
- Delay measures with atoms and piecewise-constant densities, exact and grid H
- Euler–Maruyama simulation with reproducible per-replication Philox streams
- Local-Gauss contrast, box-constrained minimum contrast estimation and the
  closed-form estimator of the two-dimensional benchmark
- Fisher information along the limit ODE and standardized errors
- Seeded Monte Carlo studies with Q-Q and Kolmogorov–Smirnov diagnostics

Quick Start:
    from src import get_model, SimConfig, simulate_path, ContrastWorkspace, minimize_contrast

    model = get_model("benchmark2d")
    path = simulate_path(model, SimConfig(n=100, epsilon=0.1, seed=42), (1, 2, 3, 4))
    ws = ContrastWorkspace.from_path(path, model.delay)
    result = minimize_contrast(ws, model, path.epsilon)
"""

__version__ = "0.3.0"

from .core.config import Config
from .core.exceptions import (
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
from .delay import DelayMeasure, HistorySegment
from .models import (
    SFDEModel,
    ParameterBox,
    DeterministicHistory,
    HistorySDE,
    Benchmark2D,
    builtin_benchmark,
    get_model,
    list_models,
    register_model,
)
from .simulation import SimConfig, PathGrid, simulate_path, solve_limit_ode, path_to_ode_distance, derive_seed
from .estimation import (
    ContrastWorkspace,
    residual_pk,
    contrast,
    contrast_gradient,
    EstimationResult,
    minimize_contrast,
    closed_form_benchmark,
    FisherInfo,
    fisher_info,
    standardized_errors,
)
from .experiment import ExperimentPlan, MonteCarloSummary, run_experiment, qq_data, ks_distance

__all__ = [
    "__version__",
    # Configuration
    "Config",
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
    # Delay measures
    "DelayMeasure",
    "HistorySegment",
    # Models
    "SFDEModel",
    "ParameterBox",
    "DeterministicHistory",
    "HistorySDE",
    "Benchmark2D",
    "builtin_benchmark",
    "get_model",
    "list_models",
    "register_model",
    # Simulation
    "SimConfig",
    "PathGrid",
    "simulate_path",
    "solve_limit_ode",
    "path_to_ode_distance",
    "derive_seed",
    # Estimation
    "ContrastWorkspace",
    "residual_pk",
    "contrast",
    "contrast_gradient",
    "EstimationResult",
    "minimize_contrast",
    "closed_form_benchmark",
    "FisherInfo",
    "fisher_info",
    "standardized_errors",
    # Experiments
    "ExperimentPlan",
    "MonteCarloSummary",
    "run_experiment",
    "qq_data",
    "ks_distance",
]
