"""
Experiments
===========

Monte Carlo consistency and normality studies with Q-Q and KS diagnostics.
"""

from .diagnostics import Reference, qq_data, ks_distance, plotting_positions
from .montecarlo import (
    ExperimentPlan,
    CellSummary,
    MonteCarloSummary,
    run_experiment,
    run_replication,
    estimate_path,
)

__all__ = [
    "Reference",
    "qq_data",
    "ks_distance",
    "plotting_positions",
    "ExperimentPlan",
    "CellSummary",
    "MonteCarloSummary",
    "run_experiment",
    "run_replication",
    "estimate_path",
]
