"""
Fisher Information
==================

Block-diagonal asymptotic information I(theta0) = diag(I_b, I_sigma) along the
limit path X0, and the standardized estimation errors built from it.

    I_b^{ij}     = int_0^1 (d b / d alpha_i)^T [sigma sigma^T]^{-1} (d b / d alpha_j) ds
    I_sigma^{ij} = 1/2 int_0^1 tr[(d S / d beta_i) S^{-1} (d S / d beta_j) S^{-1}] ds,  S = sigma sigma^T
"""

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import block_diag

from ..core.exceptions import DomainError, InformationMatrixError, ModelViolationError
from ..models.base import SFDEModel, checked_cholesky
from ..simulation.simulator import PathGrid

logger = logging.getLogger(__name__)

DERIVATIVE_STEP = 1e-6


@dataclass(frozen=True)
class FisherInfo:
    """Drift block i_b (p x p) and diffusion block i_sigma (q x q)."""

    i_b: np.ndarray
    i_sigma: np.ndarray

    @property
    def p(self) -> int:
        return self.i_b.shape[0]

    @property
    def q(self) -> int:
        return self.i_sigma.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return block_diag(self.i_b, self.i_sigma)


def _central_difference(func, theta: np.ndarray, index: int) -> np.ndarray:
    plus, minus = theta.copy(), theta.copy()
    plus[index] += DERIVATIVE_STEP
    minus[index] -= DERIVATIVE_STEP
    return (func(plus) - func(minus)) / (2.0 * DERIVATIVE_STEP)


def _symmetric(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def fisher_info(
    model: SFDEModel,
    theta0: Sequence[float],
    ode: PathGrid,
    quad_resolution: int,
) -> FisherInfo:
    """
    Trapezoid quadrature of the information integrands along the limit path.

    Args:
        model: SFDE model
        theta0: True parameter
        ode: Limit path from ``solve_limit_ode``; its resolution must be a
            multiple of quad_resolution
        quad_resolution: Quadrature nodes per unit time

    Raises:
        InformationMatrixError: If either block is not positive definite
    """
    theta0 = np.asarray(theta0, dtype=float)
    alpha, beta = model.split(theta0)
    if quad_resolution < 1 or ode.n % quad_resolution != 0:
        raise DomainError(
            f"Limit path resolution {ode.n} is not a multiple of quad_resolution {quad_resolution}",
            field="quad_resolution",
        )
    stride = ode.n // quad_resolution

    h_all = model.delay.h_discrete_path(ode.values, ode.n)
    states = ode.observations[::stride]
    h = h_all[::stride]

    xi = model.sigma_sigma_t(states, h, beta)
    factor, bad = checked_cholesky(xi)
    if factor is None:
        raise ModelViolationError(
            f"sigma sigma^T is not positive definite along the limit path at s={bad * stride / ode.n:.6g}",
            x=states[bad],
            h=h[bad],
            beta=beta,
        )

    drift_partials = [
        _central_difference(lambda t: model.drift(states, h, t), theta0, i) for i in range(model.p)
    ]
    diffusion_partials = [
        _central_difference(lambda b: model.sigma_sigma_t(states, h, b), beta, j) for j in range(model.q)
    ]

    step = 1.0 / quad_resolution
    solved_drift = [np.linalg.solve(xi, db[..., None])[..., 0] for db in drift_partials]
    i_b = np.empty((model.p, model.p))
    for i in range(model.p):
        for j in range(model.p):
            integrand = np.sum(drift_partials[i] * solved_drift[j], axis=-1)
            i_b[i, j] = trapezoid(integrand, dx=step)

    whitened = [np.linalg.solve(xi, ds) for ds in diffusion_partials]
    i_sigma = np.empty((model.q, model.q))
    for i in range(model.q):
        for j in range(model.q):
            integrand = 0.5 * np.einsum("kab,kba->k", whitened[i], whitened[j])
            i_sigma[i, j] = trapezoid(integrand, dx=step)

    info = FisherInfo(i_b=_symmetric(i_b), i_sigma=_symmetric(i_sigma))
    for name, block in (("drift", info.i_b), ("diffusion", info.i_sigma)):
        if block.size and checked_cholesky(block)[0] is None:
            raise InformationMatrixError(
                f"Fisher {name} block is not positive definite: {block.tolist()}",
                block=name,
            )
    logger.debug(f"I_b diag={np.diag(info.i_b).tolist()} I_sigma diag={np.diag(info.i_sigma).tolist()}")
    return info


def standardized_errors(
    theta_hat: Sequence[float],
    theta0: Sequence[float],
    fisher: FisherInfo,
    epsilon: float,
    n: int,
) -> Tuple[np.ndarray, float]:
    """
    Standardized errors and the quadratic-form statistic.

    Drift coordinates are scaled by eps^-1 sqrt(I_b^{ii}), diffusion
    coordinates by sqrt(n) sqrt(I_sigma^{jj}). The statistic is v^T I v with
    v = (eps^-1 (alpha_hat - alpha0), sqrt(n) (beta_hat - beta0)).

    Returns:
        (z, chi2)
    """
    error = np.asarray(theta_hat, dtype=float) - np.asarray(theta0, dtype=float)
    rates = np.concatenate([np.full(fisher.p, 1.0 / epsilon), np.full(fisher.q, np.sqrt(n))])
    scaled = rates * error
    matrix = fisher.matrix
    z = np.sqrt(np.diag(matrix)) * scaled
    chi2 = float(scaled @ matrix @ scaled)
    return z, chi2
