"""
Simulation
==========

Euler–Maruyama path generation, the limit ODE and reproducible random streams.
"""

from .rng import RNG_ALGORITHM, GAUSSIAN_TRANSFORM, derive_seed, make_generator, splitmix64
from .simulator import SimConfig, PathGrid, simulate_path, solve_limit_ode, path_to_ode_distance

__all__ = [
    "RNG_ALGORITHM",
    "GAUSSIAN_TRANSFORM",
    "derive_seed",
    "make_generator",
    "splitmix64",
    "SimConfig",
    "PathGrid",
    "simulate_path",
    "solve_limit_ode",
    "path_to_ode_distance",
]
