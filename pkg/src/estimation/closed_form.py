"""
Closed-Form Benchmark Estimator
===============================

Explicit minimizer of the contrast for the two-dimensional benchmark
b = (alpha1 H2, alpha2 H1), sigma = diag(beta1 sqrt(1 + H2^2), beta2 sqrt(1 + H1^2)).

Setting the partial derivatives of the contrast to zero gives, with
w_k = 1 + (H_n^(2))^2 and H_n evaluated at t_{k-1},

    alpha1 = n * sum(Delta_k X1 * H_n^(2) / w_k) / sum((H_n^(2))^2 / w_k)
    beta1  = eps^-1 * sqrt(sum((Delta_k X1 - alpha1 H_n^(2) / n)^2 / w_k))

and symmetrically for the second coordinate (alpha2 with H_n^(1)). The
numerator of alpha carries the increment and the residual of beta2 uses
alpha2; both follow from the stationarity conditions.
"""

import logging
from typing import Optional

import numpy as np

from ..core.exceptions import DomainError
from ..delay.measure import DelayMeasure
from ..simulation.simulator import PathGrid
from .contrast import ContrastWorkspace

logger = logging.getLogger(__name__)


def closed_form_from_workspace(ws: ContrastWorkspace, epsilon: float) -> np.ndarray:
    """Closed-form (alpha1, alpha2, beta1, beta2) from a precomputed workspace."""
    if ws.increments.shape[1] != 2:
        raise DomainError("Closed form needs a two-dimensional path", field="d", value=ws.increments.shape[1])

    n = ws.n
    estimates = np.empty(4)
    # Coordinate i is driven by the delayed other coordinate.
    for i, other in ((0, 1), (1, 0)):
        h = ws.precomputed_h[:, other]
        weight = 1.0 + h ** 2
        denominator = float(np.sum(h ** 2 / weight))
        if denominator == 0.0:
            raise DomainError(
                f"Degenerate design: H_n^({other + 1}) vanishes on every step",
                field=f"alpha{i + 1}",
                constraint="nonzero denominator",
            )
        alpha = n * float(np.sum(ws.increments[:, i] * h / weight)) / denominator
        residual = ws.increments[:, i] - alpha * h / n
        estimates[i] = alpha
        if epsilon > 0:
            estimates[2 + i] = np.sqrt(float(np.sum(residual ** 2 / weight))) / epsilon
        else:
            estimates[2 + i] = np.nan

    if not epsilon > 0:
        logger.warning("epsilon = 0: diffusion estimates are undefined and returned as NaN")
    return estimates


def closed_form_benchmark(
    path: PathGrid,
    delay: Optional[DelayMeasure] = None,
    epsilon: Optional[float] = None,
) -> np.ndarray:
    """
    Closed-form (alpha1, alpha2, beta1, beta2) of the benchmark model.

    Args:
        path: Observed two-dimensional path
        delay: Delay measure defining H_n (defaults to a point mass at path.delta)
        epsilon: Dispersion coefficient (defaults to path.epsilon)

    Raises:
        DomainError: On a degenerate design (zero denominator) or wrong dimension
    """
    delay = delay or DelayMeasure.dirac(path.delta)
    epsilon = path.epsilon if epsilon is None else epsilon
    ws = ContrastWorkspace.from_path(path, delay)
    return closed_form_from_workspace(ws, epsilon)
