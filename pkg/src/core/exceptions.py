"""
Custom Exceptions
=================

Unified exception hierarchy for consistent error handling across the toolkit.

Every error carries an ``exit_code`` used by the command-line entry point:
0 success, 2 config/input error, 3 numeric failure, 4 degenerate experiment.
"""

from typing import Optional, Dict, Any, List, Sequence


class SFDEError(Exception):
    """Base exception for all SFDE toolkit errors."""

    exit_code = 1

    def __init__(
        self,
        message: str,
        code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        super().__init__(message)
        self.message = message
        self.code = code or self.__class__.__name__
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for serialization."""
        return {
            "error": self.code,
            "message": self.message,
            "details": self.details,
            "exit_code": self.exit_code,
        }


class ConfigurationError(SFDEError):
    """Configuration-related errors (schema, unknown or missing keys, YAML syntax)."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        expected_type: Optional[str] = None,
        line: Optional[int] = None,
        **kwargs,
    ):
        details = kwargs.pop("details", {})
        if config_key:
            details["config_key"] = config_key
        if expected_type:
            details["expected_type"] = expected_type
        if line is not None:
            details["line"] = line
        super().__init__(message, details=details, **kwargs)


class ValidationError(SFDEError):
    """Input validation errors (CSV cells, header mismatches, box violations)."""

    exit_code = 2

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        value: Optional[Any] = None,
        constraint: Optional[str] = None,
        **kwargs,
    ):
        details = kwargs.pop("details", {})
        if field:
            details["field"] = field
        if value is not None:
            details["value"] = str(value)[:100]
        if constraint:
            details["constraint"] = constraint
        super().__init__(message, details=details, **kwargs)


class DomainError(ValidationError):
    """A mathematical precondition does not hold (interval range, window length, degenerate design)."""


class NumericalError(SFDEError):
    """Numeric failures during simulation, contrast evaluation or optimization."""

    exit_code = 3


class ModelViolationError(NumericalError):
    """The diffusion matrix product is not positive definite at some point."""

    def __init__(
        self,
        message: str,
        x: Optional[Sequence[float]] = None,
        h: Optional[Sequence[float]] = None,
        beta: Optional[Sequence[float]] = None,
        **kwargs,
    ):
        details = kwargs.pop("details", {})
        for name, value in (("x", x), ("h", h), ("beta", beta)):
            if value is not None:
                details[name] = [float(v) for v in value]
        super().__init__(message, details=details, **kwargs)


class SimulationDivergedError(NumericalError):
    """The Euler–Maruyama state became non-finite."""

    def __init__(self, message: str, time: Optional[float] = None, **kwargs):
        details = kwargs.pop("details", {})
        if time is not None:
            details["time"] = time
        super().__init__(message, details=details, **kwargs)


class NonFiniteError(NumericalError):
    """A contrast value overflowed."""


class OptimizationFailedError(NumericalError):
    """Every objective evaluation of the optimizer was non-finite."""


class InformationMatrixError(NumericalError):
    """A block of the Fisher matrix is not positive definite."""

    def __init__(self, message: str, block: Optional[str] = None, **kwargs):
        details = kwargs.pop("details", {})
        if block:
            details["block"] = block
        super().__init__(message, details=details, **kwargs)


class ExperimentDegenerateError(SFDEError):
    """Too many replications of a Monte Carlo cell failed."""

    exit_code = 4

    def __init__(
        self,
        message: str,
        n: Optional[int] = None,
        epsilon: Optional[float] = None,
        failing_seeds: Optional[List[int]] = None,
        **kwargs,
    ):
        details = kwargs.pop("details", {})
        if n is not None:
            details["n"] = n
        if epsilon is not None:
            details["epsilon"] = epsilon
        if failing_seeds:
            details["failing_seeds"] = list(failing_seeds)
        super().__init__(message, details=details, **kwargs)
