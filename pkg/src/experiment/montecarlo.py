"""
Monte Carlo Harness
===================

Seeded replications of simulate -> estimate -> standardize over a grid of
(n, eps) cells, aggregated into per-coordinate means and standard deviations
plus the arrays behind normal and chi-square Q-Q plots.

Replication j of cell (n, eps) uses ``derive_seed(master_seed, n, eps, j)``,
so results do not depend on scheduling or worker count.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.exceptions import ConfigurationError, ExperimentDegenerateError, SFDEError
from ..estimation.closed_form import closed_form_from_workspace
from ..estimation.contrast import ContrastWorkspace
from ..estimation.fisher import FisherInfo, fisher_info, standardized_errors
from ..estimation.optimizer import minimize_contrast
from ..models.base import SFDEModel
from ..simulation.rng import derive_seed
from ..simulation.simulator import SimConfig, simulate_path, solve_limit_ode
from .diagnostics import Reference, ks_distance

logger = logging.getLogger(__name__)

ESTIMATORS = ("closed_form", "optimizer")
CLOSED_FORM_MODELS = ("benchmark2d",)
MAX_FAILURE_FRACTION = 0.05
CROSS_CHECK_TOLERANCE = 1e-4


@dataclass
class ExperimentPlan:
    """Design of a Monte Carlo study."""

    model: SFDEModel
    theta_true: Tuple[float, ...]
    cells: Tuple[Tuple[int, float], ...]
    replications: int
    master_seed: int
    estimator: str = "closed_form"
    warm_start: bool = False
    substeps: int = 1
    fisher_resolution: int = 10_000
    diagnostics_cell: Optional[Tuple[int, float]] = None
    cross_check: bool = True

    def __post_init__(self):
        self.theta_true = tuple(float(v) for v in self.theta_true)
        self.cells = tuple((int(n), float(eps)) for n, eps in self.cells)
        self.validate()

    def validate(self) -> None:
        if self.replications < 1:
            raise ConfigurationError(
                f"replications must be >= 1, got {self.replications}",
                config_key="experiment.replications",
            )
        if not self.cells:
            raise ConfigurationError("At least one (n, epsilon) cell is required", config_key="experiment.cells")
        for n, eps in self.cells:
            if n < 1 or not 0.0 < eps <= 1.0:
                raise ConfigurationError(
                    f"Inadmissible cell (n={n}, epsilon={eps})",
                    config_key="experiment.cells",
                )
        if not self.model.box.contains(self.theta_true):
            raise ConfigurationError(
                f"theta_true {list(self.theta_true)} outside the parameter box",
                config_key="theta_true",
            )
        if self.estimator not in ESTIMATORS:
            raise ConfigurationError(
                f"Unknown estimator: {self.estimator}",
                config_key="experiment.estimator",
            )
        if self.estimator == "closed_form" and self.model.name not in CLOSED_FORM_MODELS:
            raise ConfigurationError(
                f"No closed-form estimator for model {self.model.name}",
                config_key="experiment.estimator",
            )
        if self.fisher_resolution < 1:
            raise ConfigurationError("fisher_resolution must be >= 1", config_key="experiment.fisher_resolution")
        if self.diagnostics_cell is not None:
            cell = (int(self.diagnostics_cell[0]), float(self.diagnostics_cell[1]))
            if cell not in self.cells:
                raise ConfigurationError(
                    f"diagnostics_cell {list(cell)} is not one of the cells",
                    config_key="experiment.diagnostics_cell",
                )
            self.diagnostics_cell = cell

    @property
    def selected_diagnostics_cell(self) -> Tuple[int, float]:
        """Configured cell, else the largest n with the smallest epsilon."""
        if self.diagnostics_cell is not None:
            return self.diagnostics_cell
        return max(self.cells, key=lambda cell: (cell[0], -cell[1]))


# =============================================================================
# Replication Worker
# =============================================================================


@dataclass(frozen=True)
class ReplicationTask:
    model: SFDEModel
    theta_true: Tuple[float, ...]
    n: int
    epsilon: float
    substeps: int
    index: int
    seed: int
    estimator: str
    start: Optional[Tuple[float, ...]]


@dataclass(frozen=True)
class ReplicationOutcome:
    index: int
    seed: int
    theta_hat: Optional[Tuple[float, ...]]
    error: Optional[str] = None


def estimate_path(model: SFDEModel, path, estimator: str, start=None) -> Tuple[np.ndarray, bool]:
    """Run one estimator on one path; returns (theta_hat, converged)."""
    ws = ContrastWorkspace.from_path(path, model.delay)
    if estimator == "closed_form":
        theta_hat = closed_form_from_workspace(ws, path.epsilon)
        return theta_hat, bool(np.all(np.isfinite(theta_hat)))
    result = minimize_contrast(ws, model, path.epsilon, start=start)
    return result.theta_hat, result.converged


def run_replication(task: ReplicationTask) -> ReplicationOutcome:
    """Simulate and estimate one replication; errors become failed outcomes."""
    try:
        cfg = SimConfig(n=task.n, epsilon=task.epsilon, seed=task.seed, substeps=task.substeps)
        path = simulate_path(task.model, cfg, task.theta_true)
        theta_hat, converged = estimate_path(task.model, path, task.estimator, task.start)
    except SFDEError as e:
        return ReplicationOutcome(task.index, task.seed, None, f"{e.code}: {e.message}")
    if not converged:
        return ReplicationOutcome(task.index, task.seed, None, "estimator did not converge")
    return ReplicationOutcome(task.index, task.seed, tuple(float(v) for v in theta_hat))


# =============================================================================
# Summaries
# =============================================================================


@dataclass
class CellSummary:
    """Aggregates of one (n, eps) cell over its replications."""

    n: int
    epsilon: float
    coordinates: Tuple[str, ...]
    mean: np.ndarray
    sd: np.ndarray
    sd_defined: bool
    failure_count: int
    failing_seeds: List[int]
    seeds: np.ndarray
    estimates: np.ndarray
    z_samples: np.ndarray
    chi2_samples: np.ndarray
    ks_normal: Dict[str, float] = field(default_factory=dict)
    ks_chi2: Optional[float] = None
    cross_check_gap: Optional[float] = None

    def rows(self) -> List[Dict[str, Any]]:
        """Summary CSV rows: n, epsilon, coord, mean, sd, failures."""
        return [
            {
                "n": self.n,
                "epsilon": self.epsilon,
                "coord": name,
                "mean": float(self.mean[i]),
                "sd": float(self.sd[i]),
                "failures": self.failure_count,
            }
            for i, name in enumerate(self.coordinates)
        ]


@dataclass
class MonteCarloSummary:
    """Per-cell summaries of a plan."""

    cells: List[CellSummary]
    diagnostics_cell: Tuple[int, float]
    chi2_df: int

    def cell(self, n: int, epsilon: float) -> CellSummary:
        for summary in self.cells:
            if summary.n == n and summary.epsilon == float(epsilon):
                return summary
        raise KeyError((n, epsilon))

    @property
    def diagnostics(self) -> CellSummary:
        return self.cell(*self.diagnostics_cell)

    def rows(self) -> List[Dict[str, Any]]:
        return [row for summary in self.cells for row in summary.rows()]


def _aggregate(
    plan: ExperimentPlan,
    n: int,
    epsilon: float,
    outcomes: Sequence[ReplicationOutcome],
    fisher: FisherInfo,
) -> CellSummary:
    names = plan.model.coordinate_names
    outcomes = sorted(outcomes, key=lambda o: o.index)
    seeds = np.array([o.seed for o in outcomes], dtype=np.uint64)
    estimates = np.full((len(outcomes), len(names)), np.nan)
    failing = []
    for row, outcome in enumerate(outcomes):
        if outcome.theta_hat is None:
            failing.append(outcome.seed)
            logger.debug(f"Replication {outcome.index} (seed {outcome.seed}) failed: {outcome.error}")
        else:
            estimates[row] = outcome.theta_hat

    if len(failing) > MAX_FAILURE_FRACTION * len(outcomes):
        raise ExperimentDegenerateError(
            f"{len(failing)} of {len(outcomes)} replications failed at n={n}, epsilon={epsilon}",
            n=n,
            epsilon=epsilon,
            failing_seeds=failing,
        )

    good = estimates[~np.isnan(estimates).any(axis=1)]
    mean = good.mean(axis=0)
    sd_defined = good.shape[0] > 1
    sd = good.std(axis=0, ddof=1) if sd_defined else np.zeros(len(names))
    if not sd_defined:
        logger.warning(f"Only one successful replication at n={n}, epsilon={epsilon}: sd reported as 0")

    standardized = [standardized_errors(theta, plan.theta_true, fisher, epsilon, n) for theta in good]
    z_samples = np.array([z for z, _ in standardized]).reshape(-1, len(names))
    chi2_samples = np.array([chi2 for _, chi2 in standardized])

    ks_normal = {name: ks_distance(z_samples[:, i], "std_normal") for i, name in enumerate(names)}
    ks_chi2 = ks_distance(chi2_samples, Reference("chi_square", len(names)))

    return CellSummary(
        n=n,
        epsilon=epsilon,
        coordinates=names,
        mean=mean,
        sd=sd,
        sd_defined=sd_defined,
        failure_count=len(failing),
        failing_seeds=failing,
        seeds=seeds,
        estimates=estimates,
        z_samples=z_samples,
        chi2_samples=chi2_samples,
        ks_normal=ks_normal,
        ks_chi2=ks_chi2,
    )


def _cross_check(plan: ExperimentPlan, n: int, epsilon: float) -> float:
    """Sup-norm gap between closed form and optimizer on replication 0 of a cell."""
    seed = derive_seed(plan.master_seed, n, epsilon, 0)
    path = simulate_path(plan.model, SimConfig(n=n, epsilon=epsilon, seed=seed, substeps=plan.substeps), plan.theta_true)
    closed, _ = estimate_path(plan.model, path, "closed_form")
    optimized, _ = estimate_path(plan.model, path, "optimizer")
    gap = float(np.max(np.abs(closed - optimized)))
    if gap > CROSS_CHECK_TOLERANCE:
        logger.warning(f"Closed form and optimizer differ by {gap:.3g} at n={n}, epsilon={epsilon}")
    else:
        logger.info(f"Closed form and optimizer agree to {gap:.3g} at n={n}, epsilon={epsilon}")
    return gap


def run_experiment(plan: ExperimentPlan, workers: int = 1) -> MonteCarloSummary:
    """
    Run every replication of every cell and aggregate.

    Args:
        plan: Experiment design
        workers: Worker processes (1 runs in-process)

    Raises:
        ExperimentDegenerateError: If more than 5% of a cell's replications fail
    """
    model = plan.model
    start = plan.theta_true if plan.warm_start else None
    if plan.warm_start:
        logger.info("Optimizer warm-started at theta_true")

    ode = solve_limit_ode(model, plan.theta_true, plan.fisher_resolution)
    fisher = fisher_info(model, plan.theta_true, ode, plan.fisher_resolution)
    logger.info(
        f"Fisher information at theta_true: I_b diag={np.round(np.diag(fisher.i_b), 6).tolist()}, "
        f"I_sigma diag={np.round(np.diag(fisher.i_sigma), 6).tolist()}"
    )

    summaries = []
    executor = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for n, epsilon in plan.cells:
            if math.sqrt(n) * epsilon < 3:
                logger.warning(f"sqrt(n)*epsilon = {math.sqrt(n) * epsilon:.3g} < 3 at n={n}, epsilon={epsilon}")

            tasks = [
                ReplicationTask(
                    model=model,
                    theta_true=plan.theta_true,
                    n=n,
                    epsilon=epsilon,
                    substeps=plan.substeps,
                    index=j,
                    seed=derive_seed(plan.master_seed, n, epsilon, j),
                    estimator=plan.estimator,
                    start=start,
                )
                for j in range(plan.replications)
            ]
            if executor is None:
                outcomes = [run_replication(task) for task in tasks]
            else:
                chunksize = max(1, len(tasks) // (4 * workers))
                outcomes = list(executor.map(run_replication, tasks, chunksize=chunksize))

            summary = _aggregate(plan, n, epsilon, outcomes, fisher)
            logger.info(
                f"n={n} epsilon={epsilon}: mean={np.round(summary.mean, 5).tolist()} "
                f"sd={np.round(summary.sd, 5).tolist()} failures={summary.failure_count}"
            )
            summaries.append(summary)
    finally:
        if executor is not None:
            executor.shutdown()

    if plan.cross_check and plan.estimator == "closed_form":
        smallest = min(plan.cells, key=lambda cell: (cell[0], -cell[1]))
        for summary in summaries:
            if (summary.n, summary.epsilon) == smallest:
                summary.cross_check_gap = _cross_check(plan, *smallest)

    return MonteCarloSummary(
        cells=summaries,
        diagnostics_cell=plan.selected_diagnostics_cell,
        chi2_df=model.p + model.q,
    )
