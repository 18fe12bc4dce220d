"""
Minimum Contrast Estimation
===========================

Box-constrained Nelder–Mead minimization of the contrast followed by one
projected-gradient polish.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..core.exceptions import NumericalError, OptimizationFailedError
from ..models.base import SFDEModel
from .contrast import ContrastWorkspace, contrast, contrast_gradient

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 2000
SIMPLEX_TOLERANCE = 1e-8
MAX_BACKTRACKS = 60


@dataclass
class EstimationResult:
    """Minimum contrast estimate theta_hat = (alpha_hat, beta_hat)."""

    theta_hat: np.ndarray
    contrast_value: float
    iterations: int
    converged: bool
    gradient_norm: float
    estimator: str = "optimizer"
    details: Dict[str, Any] = field(default_factory=dict)

    def to_row(self, names: Sequence[str]) -> Dict[str, Any]:
        """Flat CSV row: one column per coordinate, then contrast and converged."""
        row = {name: float(v) for name, v in zip(names, self.theta_hat)}
        row["contrast"] = float(self.contrast_value)
        row["converged"] = bool(self.converged)
        return row


def projected_gradient(theta: np.ndarray, gradient: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """Gradient with components pushing out of an active bound zeroed."""
    projected = gradient.copy()
    projected[(theta <= lower) & (gradient > 0)] = 0.0
    projected[(theta >= upper) & (gradient < 0)] = 0.0
    return projected


def minimize_contrast(
    ws: ContrastWorkspace,
    model: SFDEModel,
    epsilon: float,
    n: Optional[int] = None,
    start: Optional[Sequence[float]] = None,
) -> EstimationResult:
    """
    Minimize the contrast over the parameter box.

    Args:
        ws: Contrast workspace of the observed path
        model: SFDE model
        epsilon: Dispersion coefficient
        n: Observation resolution (defaults to the workspace's)
        start: Start point inside the box (defaults to the box center)

    Returns:
        EstimationResult inside the closed box

    Raises:
        OptimizationFailedError: If no evaluation is finite
    """
    box = model.box
    lower, upper = box.lower, box.upper
    theta0 = box.center if start is None else box.require(start, field="start")
    finite_seen = [False]

    def objective(theta: np.ndarray) -> float:
        try:
            value = contrast(ws, model, box.clip(theta), epsilon, n)
        except NumericalError:
            return np.inf
        finite_seen[0] = True
        return value

    start_value = objective(theta0)
    bounds = list(zip(lower, upper))
    iterations = 0
    converged = False
    best, best_value = theta0.copy(), start_value

    # A restart from the returned vertex catches premature simplex collapse.
    for _ in range(2):
        tolerance = SIMPLEX_TOLERANCE * (1.0 + float(np.max(np.abs(best))))
        fatol = SIMPLEX_TOLERANCE * max(1.0, abs(best_value)) if np.isfinite(best_value) else np.inf
        result = minimize(
            objective,
            best,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": tolerance,
                "fatol": fatol,
                "maxiter": max(1, MAX_ITERATIONS - iterations),
                "maxfev": 4 * MAX_ITERATIONS,
            },
        )
        iterations += int(result.nit)
        converged = bool(result.success)
        candidate = box.clip(result.x)
        candidate_value = objective(candidate)
        if candidate_value <= best_value or not np.isfinite(best_value):
            moved = float(np.max(np.abs(candidate - best)))
            best, best_value = candidate, candidate_value
        else:
            moved = 0.0
        if iterations >= MAX_ITERATIONS or moved <= tolerance:
            break

    if not finite_seen[0] or not np.isfinite(best_value):
        raise OptimizationFailedError(
            "All contrast evaluations were non-finite",
            details={"start": theta0.tolist()},
        )

    gradient = projected_gradient(best, contrast_gradient(ws, model, best, epsilon, n), lower, upper)
    best, best_value = _polish(objective, best, best_value, gradient, box)
    gradient = projected_gradient(best, contrast_gradient(ws, model, best, epsilon, n), lower, upper)
    gradient_norm = float(np.linalg.norm(gradient))

    if not converged:
        logger.warning(f"Nelder-Mead stopped after {iterations} iterations without meeting the simplex tolerance")
    logger.debug(f"theta_hat={best.tolist()} U={best_value:.10g} |grad|={gradient_norm:.3g}")

    return EstimationResult(
        theta_hat=best,
        contrast_value=float(best_value),
        iterations=iterations,
        converged=converged,
        gradient_norm=gradient_norm,
        details={"start": theta0.tolist(), "start_value": float(start_value)},
    )


def _polish(objective, theta: np.ndarray, value: float, gradient: np.ndarray, box):
    """One projected-gradient step with backtracking; kept only if it lowers the contrast."""
    norm = float(np.linalg.norm(gradient))
    if norm == 0.0 or not np.isfinite(norm):
        return theta, value

    step = 1.0
    for _ in range(MAX_BACKTRACKS):
        candidate = box.clip(theta - step * gradient)
        candidate_value = objective(candidate)
        if candidate_value < value:
            return candidate, candidate_value
        step *= 0.5
    return theta, value
