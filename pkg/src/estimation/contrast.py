"""
Local-Gauss Contrast
====================

    U(theta) = sum_k { log det Xi_{k-1}(beta) + (n / eps^2) P_k^T Xi_{k-1}^{-1} P_k }

    P_k(theta)    = Delta_k X - (1/n) b(X_{t_{k-1}}, H_n(X_{t_{k-1}-.}), theta)
    Xi_{k-1}(beta) = [sigma sigma^T](X_{t_{k-1}}, H_n(X_{t_{k-1}-.}), beta)

History observations enter only through H_n.
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from ..core.exceptions import DomainError, ModelViolationError, NonFiniteError
from ..delay.measure import DelayMeasure, grid_lag_count
from ..models.base import SFDEModel, checked_cholesky
from ..simulation.simulator import PathGrid

logger = logging.getLogger(__name__)

GRADIENT_STEP = 1e-6


@dataclass(frozen=True)
class ContrastWorkspace:
    """
    Path quantities the contrast needs, independent of theta.

    Row k-1 of each array belongs to step k = 1..n.
    """

    states: np.ndarray          # X_{t_{k-1}}
    precomputed_h: np.ndarray   # H_n(X_{t_{k-1}-.})
    increments: np.ndarray      # X_{t_k} - X_{t_{k-1}}
    n: int

    def __post_init__(self):
        lengths = {self.states.shape[0], self.precomputed_h.shape[0], self.increments.shape[0]}
        if len(lengths) != 1:
            raise DomainError("Workspace arrays have different lengths", field="workspace")
        for name in ("states", "precomputed_h", "increments"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DomainError(f"Workspace {name} has non-finite entries", field=name)
            getattr(self, name).setflags(write=False)

    @classmethod
    def from_path(cls, path: PathGrid, delay: DelayMeasure) -> "ContrastWorkspace":
        """Precompute H_n and increments once per path."""
        if grid_lag_count(path.n, delay.delta) != path.m:
            raise DomainError(
                f"Path delta={path.delta} does not match delay measure delta={delay.delta}",
                field="delta",
            )
        h_values = delay.h_discrete_path(path.values, path.n)
        observations = path.observations
        return cls(
            states=np.array(observations[:-1]),
            precomputed_h=np.array(h_values[:-1]),
            increments=np.diff(observations, axis=0),
            n=path.n,
        )

    @property
    def steps(self) -> int:
        return self.states.shape[0]

    def slice(self, start: int, stop: int) -> "ContrastWorkspace":
        """Steps start+1..stop, keeping the observation resolution n."""
        return ContrastWorkspace(
            states=np.array(self.states[start:stop]),
            precomputed_h=np.array(self.precomputed_h[start:stop]),
            increments=np.array(self.increments[start:stop]),
            n=self.n,
        )


def residuals(ws: ContrastWorkspace, model: SFDEModel, theta: Sequence[float]) -> np.ndarray:
    """All P_k(theta), shape (steps, d)."""
    theta = np.asarray(theta, dtype=float)
    return ws.increments - model.drift(ws.states, ws.precomputed_h, theta) / ws.n


def residual_pk(ws: ContrastWorkspace, model: SFDEModel, k: int, theta: Sequence[float]) -> np.ndarray:
    """P_k(theta) for 1 <= k <= steps."""
    if not 1 <= k <= ws.steps:
        raise DomainError(f"k must be in 1..{ws.steps}, got {k}", field="k", value=k)
    theta = np.asarray(theta, dtype=float)
    i = k - 1
    return ws.increments[i] - model.drift(ws.states[i], ws.precomputed_h[i], theta) / ws.n


def contrast_parts(
    ws: ContrastWorkspace,
    model: SFDEModel,
    theta: Sequence[float],
    epsilon: float,
) -> Tuple[float, float]:
    """
    Log-determinant sum and quadratic-form sum of the contrast.

    Returns:
        (sum_k log det Xi_{k-1}, sum_k P_k^T Xi_{k-1}^{-1} P_k); the contrast is
        ``logdet + (n / eps^2) * quad``

    Raises:
        ModelViolationError: If some Xi_{k-1} fails the positive-definiteness test
    """
    theta = np.asarray(theta, dtype=float)
    _, beta = model.split(theta)

    xi = model.sigma_sigma_t(ws.states, ws.precomputed_h, beta)
    factor, bad = checked_cholesky(xi)
    if factor is None:
        raise ModelViolationError(
            f"Xi is not positive definite at step k={bad + 1}",
            x=ws.states[bad],
            h=ws.precomputed_h[bad],
            beta=beta,
        )

    logdet = 2.0 * float(np.sum(np.log(np.diagonal(factor, axis1=-2, axis2=-1))))
    residual = residuals(ws, model, theta)
    whitened = np.stack(
        [solve_triangular(lower, p, lower=True, check_finite=False) for lower, p in zip(factor, residual)]
    )
    quad = float(np.sum(whitened ** 2))
    return logdet, quad


def contrast(
    ws: ContrastWorkspace,
    model: SFDEModel,
    theta: Sequence[float],
    epsilon: float,
    n: int = None,
) -> float:
    """
    Local-Gauss contrast U_{n,eps}(theta).

    Raises:
        ModelViolationError: If some Xi_{k-1} is not positive definite
        NonFiniteError: If the value overflows
    """
    n = ws.n if n is None else n
    logdet, quad = contrast_parts(ws, model, theta, epsilon)
    value = logdet + (n / epsilon ** 2) * quad
    if not np.isfinite(value):
        raise NonFiniteError(f"Contrast is not finite at theta={np.asarray(theta).tolist()}")
    return value


def contrast_gradient(
    ws: ContrastWorkspace,
    model: SFDEModel,
    theta: Sequence[float],
    epsilon: float,
    n: int = None,
) -> np.ndarray:
    """
    Central finite-difference gradient of the contrast.

    The step of coordinate i is max(1e-6, 1e-6 * |theta_i|); both evaluation
    points are clamped to the box and the difference is divided by their
    actual spread.
    """
    theta = np.asarray(theta, dtype=float)
    lower, upper = model.box.lower, model.box.upper
    gradient = np.empty_like(theta)
    for i in range(theta.size):
        step = max(GRADIENT_STEP, GRADIENT_STEP * abs(theta[i]))
        plus, minus = theta.copy(), theta.copy()
        plus[i] = min(theta[i] + step, upper[i])
        minus[i] = max(theta[i] - step, lower[i])
        spread = plus[i] - minus[i]
        gradient[i] = (contrast(ws, model, plus, epsilon, n) - contrast(ws, model, minus, epsilon, n)) / spread
    return gradient
