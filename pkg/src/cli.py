"""
Command-Line Interface
======================

Batch entry point for the simulate, estimate and montecarlo pipelines.

Usage:
    python scripts/sfde.py simulate --config config/noise_0.1.yaml --out output/
    python scripts/sfde.py estimate output/path.csv --config config/noise_0.1.yaml
    python scripts/sfde.py montecarlo --config config/noise_0.1.yaml --workers 8

Exit codes: 0 success, 2 config/input error, 3 numeric failure, 4 degenerate
experiment.
"""

import functools
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .core.config import Config
from .core.exceptions import SFDEError, ValidationError
from .estimation.closed_form import closed_form_from_workspace
from .estimation.contrast import ContrastWorkspace, contrast
from .estimation.optimizer import EstimationResult, minimize_contrast
from .experiment.diagnostics import Reference, qq_data
from .experiment.montecarlo import CLOSED_FORM_MODELS, MonteCarloSummary, run_experiment
from .simulation.rng import GAUSSIAN_TRANSFORM, RNG_ALGORITHM
from .simulation.simulator import SimConfig, simulate_path
from .utils.storage import ensure_dir, read_path_csv, save_manifest, write_path_csv, write_qq_csv, write_rows

logger = logging.getLogger(__name__)

console = Console()


def setup_logging(level: str, fmt: str = "%(message)s") -> None:
    """Route package logs through a rich handler on stderr."""
    logging.basicConfig(
        level=level,
        format=fmt,
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


def handle_errors(func):
    """Map toolkit errors to their exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SFDEError as e:
            logger.error(f"{e.code}: {e.message}")
            if e.details:
                logger.error(f"Details: {e.details}")
            click.echo(f"Error ({e.code}): {e.message}", err=True)
            sys.exit(e.exit_code)

    return wrapper


def _load(config_path: str, verbose: bool) -> Config:
    setup_logging("DEBUG" if verbose else "INFO")
    config = Config.load(config_path)
    if not verbose:
        setup_logging(config.logging.level, config.logging.format)
    return config


def _manifest(command: str, config: Config, **extra: Any) -> Dict[str, Any]:
    manifest = {
        "command": command,
        "config_hash": config.config_hash,
        "software_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "gaussian_transform": GAUSSIAN_TRANSFORM,
        "model": config.model,
    }
    manifest.update(extra)
    return manifest


@click.group()
@click.version_option(__version__, prog_name="sfde")
def cli():
    """Simulation and small-noise estimation for stochastic functional delay equations."""


# =============================================================================
# simulate
# =============================================================================


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment config (YAML)")
@click.option("--out", "out_dir", default=None, help="Output directory (default: output.directory)")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None, help="Override simulation.seed")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@handle_errors
def simulate(config_path: str, out_dir: Optional[str], seed: Optional[int], verbose: bool):
    """Simulate one path and write path.csv."""
    config = _load(config_path, verbose)
    model = config.build_model()
    section = config.require("simulation")
    cfg = SimConfig(
        n=section.n,
        epsilon=section.epsilon,
        seed=section.seed if seed is None else seed,
        substeps=section.substeps,
    )

    path = simulate_path(model, cfg, config.theta_true)
    out = ensure_dir(out_dir or config.output.directory)
    write_path_csv(path, out / "path.csv")
    save_manifest(
        _manifest("simulate", config, seed=cfg.seed, n=cfg.n, epsilon=cfg.epsilon, substeps=cfg.substeps),
        out / "manifest.yaml",
    )
    final = ", ".join(f"{v:.6g}" for v in path.final_state)
    click.echo(f"Simulated {path.values.shape[0]} rows (n={cfg.n}, epsilon={cfg.epsilon}, seed={cfg.seed}); X(1) = ({final})")


# =============================================================================
# estimate
# =============================================================================


def _check_header(path, config: Config, model) -> None:
    if not math.isclose(path.delta, model.delay.delta, rel_tol=0.0, abs_tol=1e-12):
        raise ValidationError(
            f"Path delta={path.delta} does not match the model's delta={model.delay.delta}",
            field="header.delta",
        )
    if path.d != model.d:
        raise ValidationError(f"Path has {path.d} columns, model needs {model.d}", field="header")
    if not path.epsilon > 0:
        raise ValidationError("Path epsilon must be positive for estimation", field="header.epsilon")
    if config.simulation is not None:
        if path.n != config.simulation.n:
            raise ValidationError(f"Path n={path.n} differs from simulation.n={config.simulation.n}", field="header.n")
        if path.epsilon != config.simulation.epsilon:
            raise ValidationError(
                f"Path epsilon={path.epsilon} differs from simulation.epsilon={config.simulation.epsilon}",
                field="header.epsilon",
            )


@cli.command()
@click.argument("path_csv", type=click.Path())
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment config (YAML)")
@click.option("--out", "out_dir", default=None, help="Output directory (default: output.directory)")
@click.option("--estimator", type=click.Choice(["closed_form", "optimizer"]), default=None, help="Estimator")
@click.option("--warm-start", is_flag=True, help="Start the optimizer at theta_true")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@handle_errors
def estimate(
    path_csv: str,
    config_path: str,
    out_dir: Optional[str],
    estimator: Optional[str],
    warm_start: bool,
    verbose: bool,
):
    """Estimate theta from a path file and write estimate.csv."""
    config = _load(config_path, verbose)
    model = config.build_model()
    path = read_path_csv(path_csv)
    _check_header(path, config, model)

    if estimator is None:
        estimator = config.experiment.estimator if config.experiment is not None else "optimizer"
    ws = ContrastWorkspace.from_path(path, model.delay)

    if estimator == "closed_form":
        if model.name not in CLOSED_FORM_MODELS:
            raise ValidationError(f"No closed-form estimator for model {model.name}", field="estimator")
        theta_hat = closed_form_from_workspace(ws, path.epsilon)
        result = EstimationResult(
            theta_hat=theta_hat,
            contrast_value=contrast(ws, model, theta_hat, path.epsilon),
            iterations=0,
            converged=True,
            gradient_norm=float("nan"),
            estimator="closed_form",
        )
    else:
        start = config.theta_true if warm_start else None
        result = minimize_contrast(ws, model, path.epsilon, start=start)

    names = list(model.coordinate_names)
    row = result.to_row(names)
    columns = names + ["contrast", "converged"]
    out = ensure_dir(out_dir or config.output.directory)
    write_rows(out / "estimate.csv", columns, [row])
    save_manifest(
        _manifest("estimate", config, estimator=estimator, path_csv=str(path_csv), seed=path.seed),
        out / "manifest.yaml",
    )
    click.echo(",".join(columns))
    click.echo(",".join(f"{row[c]:.17g}" if isinstance(row[c], float) else str(row[c]).lower() for c in columns))


# =============================================================================
# montecarlo
# =============================================================================


def _summary_table(summary: MonteCarloSummary) -> Table:
    coordinates = summary.cells[0].coordinates
    table = Table(title="Mean (standard deviation) of the estimator")
    table.add_column("n", justify="right")
    table.add_column("epsilon", justify="right")
    for name in coordinates:
        table.add_column(name, justify="right")
    table.add_column("failures", justify="right")
    for cell in summary.cells:
        values = [f"{m:.5f} ({s:.5f})" for m, s in zip(cell.mean, cell.sd)]
        table.add_row(str(cell.n), f"{cell.epsilon:g}", *values, str(cell.failure_count))
    return table


def write_experiment(summary: MonteCarloSummary, out: Path) -> None:
    """Write every Monte Carlo artifact from the reduced summary."""
    write_rows(out / "summary.csv", ["n", "epsilon", "coord", "mean", "sd", "failures"], summary.rows())

    ks_rows, chi2_rows = [], []
    for cell in summary.cells:
        for name, distance in cell.ks_normal.items():
            ks_rows.append({"n": cell.n, "epsilon": cell.epsilon, "coord": name, "reference": "std_normal", "ks": distance})
        ks_rows.append(
            {
                "n": cell.n,
                "epsilon": cell.epsilon,
                "coord": "chi2",
                "reference": f"chi_square({summary.chi2_df})",
                "ks": cell.ks_chi2,
            }
        )
        converged = np.flatnonzero(~np.isnan(cell.estimates).any(axis=1))
        for index, statistic in zip(converged, cell.chi2_samples):
            chi2_rows.append(
                {
                    "n": cell.n,
                    "epsilon": cell.epsilon,
                    "replication": int(index),
                    "seed": int(cell.seeds[index]),
                    "chi2": float(statistic),
                }
            )
    write_rows(out / "ks.csv", ["n", "epsilon", "coord", "reference", "ks"], ks_rows)
    write_rows(out / "chi2_samples.csv", ["n", "epsilon", "replication", "seed", "chi2"], chi2_rows)

    cell = summary.diagnostics
    for i, name in enumerate(cell.coordinates):
        write_qq_csv(out / f"qq_normal_{name}.csv", "std_normal", qq_data(cell.z_samples[:, i], "std_normal"))
    reference = Reference("chi_square", summary.chi2_df)
    write_qq_csv(out / "qq_chi2.csv", reference.label, qq_data(cell.chi2_samples, reference))


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(), help="Experiment config (YAML)")
@click.option("--out", "out_dir", default=None, help="Output directory (default: output.directory)")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes (default: output.workers)")
@click.option("--estimator", type=click.Choice(["closed_form", "optimizer"]), default=None, help="Estimator override")
@click.option("--warm-start", is_flag=True, default=None, help="Start the optimizer at theta_true")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=None, help="Override experiment.master_seed")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@handle_errors
def montecarlo(
    config_path: str,
    out_dir: Optional[str],
    workers: Optional[int],
    estimator: Optional[str],
    warm_start: Optional[bool],
    seed: Optional[int],
    verbose: bool,
):
    """Run the Monte Carlo study and write summary and diagnostics CSVs."""
    config = _load(config_path, verbose)
    plan = config.experiment_plan(estimator=estimator, warm_start=warm_start or None, master_seed=seed)
    workers = workers or config.output.workers

    summary = run_experiment(plan, workers=workers)

    out = ensure_dir(out_dir or config.output.directory)
    write_experiment(summary, out)
    save_manifest(
        _manifest(
            "montecarlo",
            config,
            master_seed=plan.master_seed,
            estimator=plan.estimator,
            warm_start=plan.warm_start,
            replications=plan.replications,
            diagnostics_cell=list(summary.diagnostics_cell),
        ),
        out / "manifest.yaml",
    )
    console.print(_summary_table(summary))
    for cell in summary.cells:
        if cell.cross_check_gap is not None:
            console.print(f"Closed form vs optimizer at n={cell.n}, epsilon={cell.epsilon:g}: gap {cell.cross_check_gap:.3g}")


def main():
    cli()


if __name__ == "__main__":
    main()
