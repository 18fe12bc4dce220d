"""
Path Simulator
==============

Euler–Maruyama generation of discretely observed SFDE paths and the explicit
Euler solution of the limit ODE (the eps = 0 equation).

Both share one kernel on the fine grid of step 1/N, N = n * substeps: the
initial segment on [-floor(N*delta)/N, 0] is sampled or simulated first, then
the main segment on [0, 1]. H_N is evaluated on the fine grid. Only every
``substeps``-th point is returned as an observation.

Noise is drawn on the observation grid first, in the same order for every
substeps value, and refined by Brownian bridges. Paths for different substeps
with one seed therefore share their Brownian motion and converge as substeps
grows. A history SDE starts at t = -delta; when N*delta is not an integer its
first step has length delta - floor(N*delta)/N.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import DomainError, SimulationDivergedError, ValidationError
from ..delay.measure import GRID_TOLERANCE, HistorySegment, grid_lag_count
from ..models.base import DeterministicHistory, HistorySDE, SFDEModel
from .rng import GAUSSIAN_TRANSFORM, RNG_ALGORITHM, make_generator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings for one path."""

    n: int
    epsilon: float
    seed: int = 0
    substeps: int = 1
    rng_algorithm: str = RNG_ALGORITHM

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n}", field="n", value=self.n)
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValidationError(
                f"substeps must be >= 1, got {self.substeps}",
                field="substeps",
                value=self.substeps,
            )
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(
                f"epsilon must be in [0, 1], got {self.epsilon}",
                field="epsilon",
                value=self.epsilon,
            )
        if self.rng_algorithm != RNG_ALGORITHM:
            raise ValidationError(
                f"Unsupported RNG algorithm: {self.rng_algorithm}",
                field="rng_algorithm",
                constraint=RNG_ALGORITHM,
            )


@dataclass
class PathGrid:
    """
    One trajectory observed at t = -floor(n*delta)/n, ..., -1/n, 0, 1/n, ..., 1.

    Row i of ``values`` is the state at time (i - floor(n*delta)) / n.
    """

    n: int
    delta: float
    epsilon: float
    values: np.ndarray
    seed: Optional[int] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        self.values = values[:, None] if values.ndim == 1 else values
        expected = self.m + self.n + 1
        if self.values.shape[0] != expected:
            raise DomainError(
                f"Path has {self.values.shape[0]} rows, expected {expected}",
                field="values",
                constraint="floor(n*delta) + n + 1 rows",
            )
        if not np.all(np.isfinite(self.values)):
            raise DomainError("Path has non-finite entries", field="values")

    @property
    def m(self) -> int:
        """Number of history lags floor(n * delta)."""
        return grid_lag_count(self.n, self.delta)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(-self.m, self.n + 1) / self.n

    @property
    def history(self) -> HistorySegment:
        return HistorySegment(values=self.values[: self.m + 1], n=self.n)

    @property
    def observations(self) -> np.ndarray:
        """States at t_k = k/n, k = 0..n."""
        return self.values[self.m:]

    @property
    def final_state(self) -> np.ndarray:
        return self.values[-1]


# =============================================================================
# Euler Kernel
# =============================================================================


def _refine_noise(noise: np.ndarray, substeps: int, rng: np.random.Generator) -> np.ndarray:
    """
    Unit normals on a grid ``substeps`` times finer, conditioned on ``noise``.

    Each coarse normal is split by a Brownian bridge, so the fine increments
    inside a coarse step sum to the coarse increment. Factors of two are split
    one level at a time (midpoints first), which makes the refinement for
    substeps = 2 the restriction of the one for substeps = 4.
    """
    while substeps % 2 == 0:
        bridge = rng.standard_normal(noise.shape)
        noise = np.stack([noise + bridge, noise - bridge], axis=1).reshape(-1, noise.shape[1]) / math.sqrt(2.0)
        substeps //= 2
    if substeps > 1:
        bridge = rng.standard_normal((noise.shape[0], substeps, noise.shape[1]))
        bridge -= bridge.mean(axis=1, keepdims=True)
        noise = (bridge + noise[:, None, :] / math.sqrt(substeps)).reshape(-1, noise.shape[1])
    return noise


def _draw_noise(
    model: SFDEModel,
    n: int,
    substeps: int,
    rng: np.random.Generator,
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray], np.ndarray]:
    """
    Fine-grid normals for the initial and main segments.

    Stream order: coarse history normals, coarse main normals, bridge
    refinements, the fine history steps older than the coarse grid, and the
    lead step of a history SDE. Draws for substeps = 1 stop after the coarse
    main normals unless the lead step is present.
    """
    delta = model.delay.delta
    fine_n = n * substeps
    coarse_lags = grid_lag_count(n, delta)
    fine_lags = grid_lag_count(fine_n, delta)
    stochastic_history = isinstance(model.history, HistorySDE)

    coarse = []
    if stochastic_history:
        coarse.append(rng.standard_normal((coarse_lags, model.r)))
    coarse.append(rng.standard_normal((n, model.r)))
    refined = _refine_noise(np.vstack(coarse), substeps, rng)

    split = len(refined) - fine_n
    main_noise = refined[split:]
    if not stochastic_history:
        return None, None, main_noise

    history_noise = refined[:split]
    older = fine_lags - split
    if older > 0:
        history_noise = np.vstack([rng.standard_normal((older, model.r)), history_noise])
    lead_noise = rng.standard_normal(model.r) if _lead_step(fine_n, delta) > 0 else None
    return history_noise, lead_noise, main_noise


def _lead_step(fine_n: int, delta: float) -> float:
    """Length delta - floor(N*delta)/N of the history SDE step that starts at -delta."""
    lead = delta - grid_lag_count(fine_n, delta) / fine_n
    return lead if lead * fine_n > GRID_TOLERANCE else 0.0


def _initial_segment(
    model: SFDEModel,
    fine_n: int,
    epsilon: float,
    noise: Optional[np.ndarray],
    lead_noise: Optional[np.ndarray],
) -> HistorySegment:
    """Initial segment on the fine grid t = -floor(N*delta)/N, ..., 0."""
    history = model.history
    lags = grid_lag_count(fine_n, model.delay.delta)
    segment = np.empty((lags + 1, model.d))

    if isinstance(history, DeterministicHistory):
        for j in range(lags + 1):
            segment[j] = history((j - lags) / fine_n)
        return HistorySegment(values=segment, n=fine_n)

    if not isinstance(history, HistorySDE):
        raise ValidationError(f"Unsupported history law: {type(history).__name__}", field="history")

    x = np.asarray(history.initial_value, dtype=float)
    lead = _lead_step(fine_n, model.delay.delta)
    if lead > 0:
        x0 = x
        x = x0 + history.drift(x0) * lead
        if lead_noise is not None:
            x = x + history.diffusion(x0, epsilon) @ (math.sqrt(lead) * lead_noise)

    step = 1.0 / fine_n
    sqrt_step = math.sqrt(step)
    segment[0] = x
    for j in range(1, lags + 1):
        x_next = x + history.drift(x) * step
        if noise is not None:
            x_next = x_next + history.diffusion(x, epsilon) @ (sqrt_step * noise[j - 1])
        if not np.all(np.isfinite(x_next)):
            raise SimulationDivergedError(
                f"Initial segment diverged at t={(j - lags) / fine_n:.6g}",
                time=(j - lags) / fine_n,
            )
        segment[j] = x_next
        x = x_next
    return HistorySegment(values=segment, n=fine_n)


def _euler_scheme(
    model: SFDEModel,
    theta: np.ndarray,
    n: int,
    epsilon: float,
    substeps: int = 1,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """
    Fine-grid values of the whole path, oldest first.

    The noise term is skipped when epsilon == 0 or rng is None.
    """
    fine_n = n * substeps
    noisy = epsilon > 0 and rng is not None

    history_noise = lead_noise = main_noise = None
    if noisy:
        history_noise, lead_noise, main_noise = _draw_noise(model, n, substeps, rng)

    initial = _initial_segment(model, fine_n, epsilon, history_noise, lead_noise)
    initial.check_length(model.delay.delta)
    lags = initial.values.shape[0] - 1

    values = np.empty((lags + fine_n + 1, model.d))
    values[: lags + 1] = initial.values

    weights = model.delay.cell_weights(fine_n)
    active_lags = np.flatnonzero(weights)
    active_weights = weights[active_lags]

    _, beta = model.split(theta)
    step = 1.0 / fine_n
    sqrt_step = math.sqrt(step)
    scale = epsilon * sqrt_step

    x = values[lags]
    for k in range(fine_n):
        i = lags + k
        h = active_weights @ values[i - active_lags]
        x_next = x + model.drift(x, h, theta) * step
        if noisy:
            x_next = x_next + scale * (model.diffusion(x, h, beta) @ main_noise[k])
        if not np.all(np.isfinite(x_next)):
            raise SimulationDivergedError(
                f"Simulation diverged at t={(k + 1) / fine_n:.6g}",
                time=(k + 1) / fine_n,
            )
        values[i + 1] = x_next
        x = x_next

    return values


# =============================================================================
# Public Operations
# =============================================================================


def simulate_path(model: SFDEModel, cfg: SimConfig, theta_true: Sequence[float]) -> PathGrid:
    """
    Simulate one discretely observed path by Euler–Maruyama.

    Args:
        model: SFDE model
        cfg: Simulation settings (n, epsilon, seed, substeps)
        theta_true: True parameter (alpha, beta) inside the box

    Returns:
        PathGrid holding the observation-grid points only

    Raises:
        SimulationDivergedError: If the state becomes non-finite
    """
    theta = model.box.require(theta_true, field="theta_true")
    fine_n = cfg.n * cfg.substeps
    rng = make_generator(cfg.seed)

    fine = _euler_scheme(model, theta, cfg.n, cfg.epsilon, substeps=cfg.substeps, rng=rng)

    fine_lags = grid_lag_count(fine_n, model.delay.delta)
    lags = grid_lag_count(cfg.n, model.delay.delta)
    observed = fine[fine_lags - lags * cfg.substeps:: cfg.substeps]

    path = PathGrid(
        n=cfg.n,
        delta=model.delay.delta,
        epsilon=cfg.epsilon,
        values=observed,
        seed=cfg.seed,
        metadata={
            "model": model.name,
            "theta_true": [float(v) for v in theta],
            "scheme": "euler-maruyama",
            "substeps": cfg.substeps,
            "rng_algorithm": cfg.rng_algorithm,
            "gaussian_transform": GAUSSIAN_TRANSFORM,
        },
    )
    logger.debug(f"Simulated path n={cfg.n} eps={cfg.epsilon} seed={cfg.seed}, X(1)={path.final_state.tolist()}")
    return path


def solve_limit_ode(
    model: SFDEModel,
    theta0: Sequence[float],
    resolution: int,
    phi: Optional[Callable[[float], Sequence[float]]] = None,
) -> PathGrid:
    """
    Explicit Euler solution of dX0 = b(X0, H(X0_{t-.}), theta0) dt on [-delta, 1].

    Args:
        model: SFDE model
        theta0: Parameter (alpha, beta)
        resolution: Steps per unit time
        phi: Deterministic initial segment; defaults to the model's history law
            solved with eps = 0

    Returns:
        Dense PathGrid at the requested resolution with epsilon = 0
    """
    theta = model.box.require(theta0, field="theta0")
    if int(resolution) != resolution or resolution < 1:
        raise ValidationError(f"resolution must be >= 1, got {resolution}", field="resolution")
    if phi is not None:
        model = model.with_history(DeterministicHistory(phi))

    values = _euler_scheme(model, theta, int(resolution), 0.0)
    return PathGrid(
        n=int(resolution),
        delta=model.delay.delta,
        epsilon=0.0,
        values=values,
        metadata={
            "model": model.name,
            "theta_true": [float(v) for v in theta],
            "scheme": "euler",
        },
    )


def path_to_ode_distance(path: PathGrid, ode: PathGrid) -> float:
    """
    Sup over observation times of |X_t - X0_t| (Euclidean norm).

    Raises:
        DomainError: If the limit path grid does not refine the observation grid
    """
    if ode.n % path.n != 0 or not math.isclose(ode.delta, path.delta) or ode.d != path.d:
        raise DomainError(
            f"Grid mismatch: path n={path.n}, delta={path.delta}; limit n={ode.n}, delta={ode.delta}",
            field="ode",
            constraint="limit resolution must be a multiple of n",
        )
    stride = ode.n // path.n
    start = ode.m - path.m * stride
    if start < 0:
        raise DomainError("Limit path does not cover the observed history", field="ode")
    sampled = ode.values[start::stride]
    return float(np.max(np.linalg.norm(path.values - sampled, axis=1)))
