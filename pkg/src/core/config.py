"""
Configuration System
====================

Validated experiment configuration with typed dataclasses.

A config document names a model, the true parameter and optional overrides of
the parameter box and delay measure, plus the settings of the single-path
(``simulation``) and Monte Carlo (``experiment``) pipelines. Unknown keys are
rejected and missing required keys are named.
"""

import hashlib
import json
import logging
import os
import re
from dataclasses import MISSING, asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import yaml

from .exceptions import ConfigurationError, SFDEError

logger = logging.getLogger(__name__)

_ENV_PATTERN = re.compile(r"\$\{([^}:]+)(?::-([^}]*))?\}")


def _number(value: Any, kind: type, key: str):
    """Coerce a scalar (possibly an interpolated string) to int or float."""
    if isinstance(value, bool):
        raise ConfigurationError(f"{key} must be {kind.__name__}, got bool", config_key=key, expected_type=kind.__name__)
    if kind is int and isinstance(value, int):
        return value
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise ConfigurationError(
            f"{key} must be {kind.__name__}, got {value!r}",
            config_key=key,
            expected_type=kind.__name__,
        )
    if kind is float:
        return number
    if isinstance(value, str) and value.strip().isdigit():
        return int(value)
    if not number.is_integer():
        raise ConfigurationError(f"{key} must be an integer, got {value!r}", config_key=key, expected_type="int")
    return int(number)


def _flag(value: Any, key: str) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.lower() in ("true", "false", "1", "0", "yes", "no"):
        return value.lower() in ("true", "1", "yes")
    raise ConfigurationError(f"{key} must be a boolean, got {value!r}", config_key=key, expected_type="bool")


def _numbers(value: Any, key: str) -> List[float]:
    if not isinstance(value, (list, tuple)):
        raise ConfigurationError(f"{key} must be a list, got {value!r}", config_key=key, expected_type="list")
    return [_number(v, float, f"{key}[{i}]") for i, v in enumerate(value)]


def _section(cls, data: Any, name: str):
    """Build a section dataclass, rejecting unknown keys and naming missing ones."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"Section '{name}' must be a mapping", config_key=name, expected_type="mapping")
    known = {f.name: f for f in fields(cls) if f.init}
    for key in data:
        if key not in known:
            raise ConfigurationError(
                f"Unknown key '{name}.{key}'. Allowed: {', '.join(known)}",
                config_key=f"{name}.{key}",
            )
    for key, spec in known.items():
        if spec.default is MISSING and spec.default_factory is MISSING and key not in data:
            raise ConfigurationError(f"Missing required key '{name}.{key}'", config_key=f"{name}.{key}")
    return cls(**data)


# =============================================================================
# Configuration Dataclasses
# =============================================================================


@dataclass
class BoxConfig:
    """Parameter box bounds; scalars broadcast over the model's p or q."""

    alpha_lo: Union[float, List[float]]
    alpha_hi: Union[float, List[float]]
    beta_lo: Union[float, List[float]]
    beta_hi: Union[float, List[float]]

    def __post_init__(self):
        for name in ("alpha_lo", "alpha_hi", "beta_lo", "beta_hi"):
            value = getattr(self, name)
            key = f"box.{name}"
            setattr(self, name, _numbers(value, key) if isinstance(value, (list, tuple)) else _number(value, float, key))

    @staticmethod
    def _expand(value, size: int, key: str) -> List[float]:
        if isinstance(value, list):
            if len(value) != size:
                raise ConfigurationError(f"{key} needs {size} entries, got {len(value)}", config_key=key)
            return value
        return [value] * size

    def bounds(self, p: int, q: int) -> Dict[str, List[float]]:
        return {
            "alpha_lo": self._expand(self.alpha_lo, p, "box.alpha_lo"),
            "alpha_hi": self._expand(self.alpha_hi, p, "box.alpha_hi"),
            "beta_lo": self._expand(self.beta_lo, q, "box.beta_lo"),
            "beta_hi": self._expand(self.beta_hi, q, "box.beta_hi"),
        }


@dataclass
class DelayConfig:
    """Delay measure override: atoms [[u, w], ...] and density [[a, b, h], ...]."""

    delta: float
    atoms: List[List[float]] = field(default_factory=list)
    density: List[List[float]] = field(default_factory=list)

    def __post_init__(self):
        self.delta = _number(self.delta, float, "delay.delta")
        self.atoms = [_numbers(a, f"delay.atoms[{i}]") for i, a in enumerate(self.atoms or [])]
        self.density = [_numbers(p, f"delay.density[{i}]") for i, p in enumerate(self.density or [])]
        for i, atom in enumerate(self.atoms):
            if len(atom) != 2:
                raise ConfigurationError("Atoms are [location, mass] pairs", config_key=f"delay.atoms[{i}]")
        for i, piece in enumerate(self.density):
            if len(piece) != 3:
                raise ConfigurationError("Density pieces are [a, b, height] triples", config_key=f"delay.density[{i}]")


@dataclass
class SimulationConfig:
    """Single-path settings."""

    n: int
    epsilon: float
    seed: int = 0
    substeps: int = 1

    def __post_init__(self):
        self.n = _number(self.n, int, "simulation.n")
        self.epsilon = _number(self.epsilon, float, "simulation.epsilon")
        self.seed = _number(self.seed, int, "simulation.seed")
        self.substeps = _number(self.substeps, int, "simulation.substeps")
        self.validate()

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigurationError(f"n must be >= 1, got {self.n}", config_key="simulation.n")
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigurationError(f"epsilon must be in (0, 1], got {self.epsilon}", config_key="simulation.epsilon")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer", config_key="simulation.seed")
        if self.substeps < 1:
            raise ConfigurationError(f"substeps must be >= 1, got {self.substeps}", config_key="simulation.substeps")


@dataclass
class ExperimentConfig:
    """Monte Carlo settings."""

    cells: List[List[float]]
    replications: int
    master_seed: int = 0
    estimator: str = "closed_form"
    warm_start: bool = False
    substeps: int = 1
    fisher_resolution: int = 10_000
    diagnostics_cell: Optional[List[float]] = None
    cross_check: bool = True

    VALID_ESTIMATORS = {"closed_form", "optimizer"}

    def __post_init__(self):
        if not isinstance(self.cells, list) or not self.cells:
            raise ConfigurationError("cells must be a nonempty list of [n, epsilon]", config_key="experiment.cells")
        cells = []
        for i, cell in enumerate(self.cells):
            key = f"experiment.cells[{i}]"
            if not isinstance(cell, (list, tuple)) or len(cell) != 2:
                raise ConfigurationError("Each cell is an [n, epsilon] pair", config_key=key)
            cells.append([_number(cell[0], int, key), _number(cell[1], float, key)])
        self.cells = cells
        self.replications = _number(self.replications, int, "experiment.replications")
        self.master_seed = _number(self.master_seed, int, "experiment.master_seed")
        self.warm_start = _flag(self.warm_start, "experiment.warm_start")
        self.cross_check = _flag(self.cross_check, "experiment.cross_check")
        self.substeps = _number(self.substeps, int, "experiment.substeps")
        self.fisher_resolution = _number(self.fisher_resolution, int, "experiment.fisher_resolution")
        if self.diagnostics_cell is not None:
            key = "experiment.diagnostics_cell"
            if not isinstance(self.diagnostics_cell, (list, tuple)) or len(self.diagnostics_cell) != 2:
                raise ConfigurationError("diagnostics_cell is an [n, epsilon] pair", config_key=key)
            self.diagnostics_cell = [
                _number(self.diagnostics_cell[0], int, key),
                _number(self.diagnostics_cell[1], float, key),
            ]
        self.validate()

    def validate(self) -> None:
        if self.replications < 1:
            raise ConfigurationError(
                f"replications must be >= 1, got {self.replications}",
                config_key="experiment.replications",
            )
        if not isinstance(self.estimator, str) or self.estimator not in self.VALID_ESTIMATORS:
            raise ConfigurationError(f"Invalid estimator: {self.estimator!r}", config_key="experiment.estimator")
        if not 0 <= self.master_seed < 2 ** 64:
            raise ConfigurationError("master_seed must be an unsigned 64-bit integer", config_key="experiment.master_seed")
        for n, eps in self.cells:
            if n < 1 or not 0.0 < eps <= 1.0:
                raise ConfigurationError(f"Inadmissible cell [{n}, {eps}]", config_key="experiment.cells")


@dataclass
class OutputConfig:
    """Output and worker settings."""

    directory: str = "./output"
    workers: int = 1

    def __post_init__(self):
        self.directory = str(self.directory)
        self.workers = _number(self.workers, int, "output.workers")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}", config_key="output.workers")


@dataclass
class LoggingConfig:
    level: str = "INFO"
    format: str = "%(message)s"

    VALID_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR"}

    def __post_init__(self):
        self.level = str(self.level).upper()
        if self.level not in self.VALID_LEVELS:
            raise ConfigurationError(f"Invalid log level: {self.level}", config_key="logging.level")


# =============================================================================
# Main Configuration Class
# =============================================================================


_SECTIONS = {
    "box": BoxConfig,
    "delay": DelayConfig,
    "simulation": SimulationConfig,
    "experiment": ExperimentConfig,
    "output": OutputConfig,
    "logging": LoggingConfig,
}
_TOP_LEVEL = ("model", "theta_true", *_SECTIONS)


@dataclass
class Config:
    """
    Experiment configuration.

    ``simulation`` is required by the simulate and estimate commands,
    ``experiment`` by the Monte Carlo command.
    """

    model: str
    theta_true: List[float]
    box: Optional[BoxConfig] = None
    delay: Optional[DelayConfig] = None
    simulation: Optional[SimulationConfig] = None
    experiment: Optional[ExperimentConfig] = None
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Config":
        """
        Load a YAML config with environment variable interpolation.

        Raises:
            ConfigurationError: On a missing file, YAML syntax error (with
                line number) or schema violation
        """
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Config file not found: {path}", config_key=str(path))
        logger.info(f"Loading config from: {path}")
        try:
            with open(path, "r") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            line = mark.line + 1 if mark is not None else None
            raise ConfigurationError(
                f"Invalid YAML in {path}" + (f" at line {line}" if line else "") + f": {e}",
                config_key=str(path),
                line=line,
            )
        return cls.from_dict(cls._interpolate_env_vars(data))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Config":
        """Create Config from a dictionary with strict schema validation."""
        if not isinstance(data, dict):
            raise ConfigurationError("Config document must be a mapping", expected_type="mapping")
        for key in data:
            if key not in _TOP_LEVEL:
                raise ConfigurationError(
                    f"Unknown key '{key}'. Allowed: {', '.join(_TOP_LEVEL)}",
                    config_key=str(key),
                )
        for key in ("model", "theta_true"):
            if key not in data:
                raise ConfigurationError(f"Missing required key '{key}'", config_key=key)

        sections = {
            name: _section(section_cls, data.get(name), name)
            for name, section_cls in _SECTIONS.items()
            if data.get(name) is not None or name in ("output", "logging")
        }
        return cls(
            model=str(data["model"]),
            theta_true=_numbers(data["theta_true"], "theta_true"),
            **sections,
        )

    @staticmethod
    def _interpolate_env_vars(data: Any) -> Any:
        """Recursively interpolate ${VAR} and ${VAR:-default} patterns."""
        if isinstance(data, str):
            return _ENV_PATTERN.sub(lambda m: os.environ.get(m.group(1), m.group(2) or ""), data)
        if isinstance(data, dict):
            return {k: Config._interpolate_env_vars(v) for k, v in data.items()}
        if isinstance(data, list):
            return [Config._interpolate_env_vars(item) for item in data]
        return data

    def to_dict(self) -> Dict[str, Any]:
        """Canonical dictionary of the parsed config (None sections omitted)."""
        result: Dict[str, Any] = {"model": self.model, "theta_true": list(self.theta_true)}
        for name in _SECTIONS:
            section = getattr(self, name)
            if section is not None:
                result[name] = asdict(section)
        return result

    @property
    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of the parsed config."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def require(self, section: str):
        value = getattr(self, section)
        if value is None:
            raise ConfigurationError(f"Missing required section '{section}'", config_key=section)
        return value

    # -------------------------------------------------------------------------
    # Builders
    # -------------------------------------------------------------------------

    def build_model(self):
        """Instantiate the named model with box and delay overrides applied."""
        from ..delay.measure import DelayMeasure
        from ..models.base import ParameterBox
        from ..models.factory import get_model

        model = get_model(self.model)
        try:
            if self.box is not None:
                model = model.with_box(ParameterBox(**self.box.bounds(model.p, model.q)))
            if self.delay is not None:
                model = model.with_delay(DelayMeasure.from_dict(asdict(self.delay)))
        except ConfigurationError:
            raise
        except SFDEError as e:
            raise ConfigurationError(f"Invalid model override: {e.message}", config_key=e.details.get("field"))

        if len(self.theta_true) != model.p + model.q:
            raise ConfigurationError(
                f"theta_true needs {model.p + model.q} entries for {model.name}, got {len(self.theta_true)}",
                config_key="theta_true",
            )
        if not model.box.contains(self.theta_true):
            raise ConfigurationError(
                f"theta_true {self.theta_true} outside the parameter box",
                config_key="theta_true",
            )
        return model

    def experiment_plan(
        self,
        model=None,
        estimator: Optional[str] = None,
        warm_start: Optional[bool] = None,
        master_seed: Optional[int] = None,
    ):
        """ExperimentPlan from the ``experiment`` section, with CLI overrides."""
        from ..experiment.montecarlo import ExperimentPlan

        section = self.require("experiment")
        return ExperimentPlan(
            model=model if model is not None else self.build_model(),
            theta_true=tuple(self.theta_true),
            cells=tuple(tuple(cell) for cell in section.cells),
            replications=section.replications,
            master_seed=section.master_seed if master_seed is None else master_seed,
            estimator=estimator or section.estimator,
            warm_start=section.warm_start if warm_start is None else warm_start,
            substeps=section.substeps,
            fisher_resolution=section.fisher_resolution,
            diagnostics_cell=tuple(section.diagnostics_cell) if section.diagnostics_cell else None,
            cross_check=section.cross_check,
        )
