"""
Base SFDE Model
===============

Abstract base class for stochastic functional delay equation models

    dX_t = b(X_t, H(X_{t-.}), alpha) dt + eps * sigma(X_t, H(X_{t-.}), beta) dW_t

together with the parameter box and the law of the initial segment on [-delta, 0].

Coefficient functions broadcast over leading axes: ``x`` and ``h`` may have
shape (..., d) and the results then have shape (..., d) and (..., d, r).
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.exceptions import DomainError, ModelViolationError, ValidationError
from ..delay.measure import DelayMeasure

logger = logging.getLogger(__name__)

# Floor on Cholesky pivots L_ii^2 of sigma sigma^T.
PD_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ParameterBox:
    """Box Theta_alpha x Theta_beta of admissible parameters."""

    alpha_lo: Tuple[float, ...]
    alpha_hi: Tuple[float, ...]
    beta_lo: Tuple[float, ...]
    beta_hi: Tuple[float, ...]

    def __post_init__(self):
        for name in ("alpha_lo", "alpha_hi", "beta_lo", "beta_hi"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        """Check shapes and that lo < hi componentwise."""
        if len(self.alpha_lo) != len(self.alpha_hi) or len(self.beta_lo) != len(self.beta_hi):
            raise ValidationError("Box bounds have mismatched lengths", field="box")
        if not self.beta_lo:
            raise ValidationError("Box needs at least one diffusion parameter", field="box.beta_lo")
        lower, upper = self.lower, self.upper
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValidationError("Box must be bounded", field="box", constraint="finite bounds")
        if np.any(lower >= upper):
            raise ValidationError("Box needs lo < hi componentwise", field="box", constraint="lo < hi")

    @classmethod
    def uniform(cls, p: int, q: int, lo: float, hi: float) -> "ParameterBox":
        return cls((lo,) * p, (hi,) * p, (lo,) * q, (hi,) * q)

    @property
    def p(self) -> int:
        return len(self.alpha_lo)

    @property
    def q(self) -> int:
        return len(self.beta_lo)

    @property
    def lower(self) -> np.ndarray:
        return np.array(self.alpha_lo + self.beta_lo)

    @property
    def upper(self) -> np.ndarray:
        return np.array(self.alpha_hi + self.beta_hi)

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, theta: Sequence[float]) -> bool:
        """True if theta lies in the closed box."""
        theta = np.asarray(theta, dtype=float)
        return theta.shape == (self.p + self.q,) and bool(
            np.all(theta >= self.lower) and np.all(theta <= self.upper)
        )

    def clip(self, theta: Sequence[float]) -> np.ndarray:
        return np.clip(np.asarray(theta, dtype=float), self.lower, self.upper)

    def require(self, theta: Sequence[float], field: str = "theta") -> np.ndarray:
        """Return theta as an array, raising if it lies outside the box."""
        theta = np.asarray(theta, dtype=float)
        if not self.contains(theta):
            raise ValidationError(
                f"{field} = {theta.tolist()} outside the parameter box",
                field=field,
                value=theta.tolist(),
            )
        return theta


# =============================================================================
# History Laws
# =============================================================================


@dataclass(frozen=True)
class DeterministicHistory:
    """Known initial segment phi(t) on [-delta, 0]."""

    phi: Callable[[float], Sequence[float]]

    def __call__(self, t: float) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.phi(t), dtype=float))


@dataclass(frozen=True)
class HistorySDE:
    """
    Auxiliary SDE generating the initial segment on [-delta, 0].

    ``diffusion(x, epsilon)`` already contains the dispersion coefficient.
    """

    drift: Callable[[np.ndarray], np.ndarray]
    diffusion: Callable[[np.ndarray, float], np.ndarray]
    initial_value: Tuple[float, ...]


HistoryLaw = Union[DeterministicHistory, HistorySDE]


# =============================================================================
# Model Interface
# =============================================================================


def checked_cholesky(matrix: np.ndarray, tolerance: float = PD_TOLERANCE) -> Tuple[np.ndarray, Optional[int]]:
    """
    Batched lower Cholesky factor with a pivot floor.

    Returns:
        (L, None) on success, or (None, index) with the flat index of the
        first matrix failing the test
    """
    matrix = np.asarray(matrix, dtype=float)
    try:
        factor = np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        factor = None

    if factor is None:
        flat = matrix.reshape((-1,) + matrix.shape[-2:])
        for index, block in enumerate(flat):
            try:
                np.linalg.cholesky(block)
            except np.linalg.LinAlgError:
                return None, index
        return None, 0

    pivots = np.diagonal(factor, axis1=-2, axis2=-1) ** 2
    bad = ~(pivots > tolerance)
    if np.any(bad):
        flat_bad = np.any(bad.reshape((-1, pivots.shape[-1])), axis=1)
        return None, int(np.argmax(flat_bad))
    return factor, None


class SFDEModel(ABC):
    """
    Abstract base class for SFDE models.

    Implementations provide the dimensions, the drift b(x, h, theta), the
    diffusion sigma(x, h, beta), a parameter box, a delay measure and a
    history law. Coefficients must be pure functions.
    """

    def __init__(
        self,
        box: ParameterBox,
        delay: DelayMeasure,
        history: HistoryLaw,
    ):
        self.box = box
        self.delay = delay
        self.history = history
        if box.p != self.p or box.q != self.q:
            raise ValidationError(
                f"Box dimensions ({box.p}, {box.q}) do not match model ({self.p}, {self.q})",
                field="box",
            )

    @property
    @abstractmethod
    def name(self) -> str:
        """Registry name of the model."""
        pass

    @property
    @abstractmethod
    def d(self) -> int:
        """State dimension."""
        pass

    @property
    @abstractmethod
    def r(self) -> int:
        """Brownian dimension."""
        pass

    @property
    @abstractmethod
    def p(self) -> int:
        """Number of drift parameters."""
        pass

    @property
    @abstractmethod
    def q(self) -> int:
        """Number of diffusion parameters."""
        pass

    @abstractmethod
    def drift(self, x: np.ndarray, h: np.ndarray, theta: np.ndarray) -> np.ndarray:
        """b(x, h, theta) with theta = (alpha, beta)."""
        pass

    @abstractmethod
    def diffusion(self, x: np.ndarray, h: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """sigma(x, h, beta), a d x r matrix."""
        pass

    # -------------------------------------------------------------------------
    # Derived quantities
    # -------------------------------------------------------------------------

    @property
    def coordinate_names(self) -> Tuple[str, ...]:
        return tuple(f"alpha{i + 1}" for i in range(self.p)) + tuple(f"beta{j + 1}" for j in range(self.q))

    def split(self, theta: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        """Split theta into (alpha, beta)."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.p + self.q,):
            raise DomainError(
                f"theta must have length {self.p + self.q}, got {theta.shape}",
                field="theta",
            )
        return theta[: self.p], theta[self.p:]

    def sigma_sigma_t(self, x: np.ndarray, h: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """[sigma sigma^T](x, h, beta), broadcasting over leading axes."""
        sigma = self.diffusion(x, h, beta)
        return sigma @ np.swapaxes(sigma, -1, -2)

    def check_sigma_pd(self, x: np.ndarray, h: np.ndarray, beta: np.ndarray) -> np.ndarray:
        """
        Cholesky factor of sigma sigma^T at one point.

        Raises:
            ModelViolationError: If any pivot is at or below PD_TOLERANCE
        """
        x, h, beta = (np.asarray(v, dtype=float) for v in (x, h, beta))
        factor, bad = checked_cholesky(self.sigma_sigma_t(x, h, beta))
        if factor is None:
            raise ModelViolationError(
                f"sigma sigma^T is not positive definite at x={x.tolist()}, h={h.tolist()}, beta={beta.tolist()}",
                x=np.ravel(x),
                h=np.ravel(h),
                beta=np.ravel(beta),
            )
        return factor

    # -------------------------------------------------------------------------
    # Variants
    # -------------------------------------------------------------------------

    def with_box(self, box: ParameterBox) -> "SFDEModel":
        return self._copy(box=box)

    def with_delay(self, delay: DelayMeasure) -> "SFDEModel":
        return self._copy(delay=delay)

    def with_history(self, history: HistoryLaw) -> "SFDEModel":
        return self._copy(history=history)

    def _copy(self, **changes) -> "SFDEModel":
        clone = object.__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.__dict__.update(changes)
        box = changes.get("box")
        if box is not None and (box.p != self.p or box.q != self.q):
            raise ValidationError(
                f"Box dimensions ({box.p}, {box.q}) do not match model ({self.p}, {self.q})",
                field="box",
            )
        return clone

    def __repr__(self) -> str:
        return f"{type(self).__name__}(d={self.d}, r={self.r}, p={self.p}, q={self.q}, delta={self.delay.delta})"
