"""
Benchmark Model
===============

Two-dimensional SFDE with cross-coupled delayed drift:

    dX1 = alpha1 * H(X2) dt + eps * beta1 * sqrt(1 + H(X2)^2) dW1
    dX2 = alpha2 * H(X1) dt + eps * beta2 * sqrt(1 + H(X1)^2) dW2

on [0, 1], with H(X_{t-.}) = X_{t-delta}, delta = 1/10. The initial segment
on [-delta, 0] follows

    dX1 = 5 X2 dt + 7 eps sqrt(1 + X2^2) dW1
    dX2 = 6 X1 dt + 8 eps sqrt(1 + X1^2) dW2

started from (1, 2) at t = -delta.

Assumptions on moments and smoothness of the initial segment are taken as
given; they are not checked at runtime.
"""

import logging
from typing import Optional

import numpy as np

from ..delay.measure import DelayMeasure
from .base import SFDEModel, ParameterBox, HistorySDE, HistoryLaw
from .factory import register_model

logger = logging.getLogger(__name__)

BENCHMARK_DELTA = 0.1
BENCHMARK_THETA = (1.0, 2.0, 3.0, 4.0)


def _history_drift(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.stack([5.0 * x[..., 1], 6.0 * x[..., 0]], axis=-1)


def _history_diffusion(x: np.ndarray, epsilon: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1] + (2, 2))
    out[..., 0, 0] = 7.0 * epsilon * np.sqrt(1.0 + x[..., 1] ** 2)
    out[..., 1, 1] = 8.0 * epsilon * np.sqrt(1.0 + x[..., 0] ** 2)
    return out


def benchmark_history() -> HistorySDE:
    return HistorySDE(drift=_history_drift, diffusion=_history_diffusion, initial_value=(1.0, 2.0))


@register_model("benchmark2d")
class Benchmark2D(SFDEModel):
    """Cross-coupled two-dimensional benchmark; default box [0.1, 10]^4."""

    def __init__(
        self,
        box: Optional[ParameterBox] = None,
        delay: Optional[DelayMeasure] = None,
        history: Optional[HistoryLaw] = None,
    ):
        super().__init__(
            box=box or ParameterBox.uniform(2, 2, 0.1, 10.0),
            delay=delay or DelayMeasure.dirac(BENCHMARK_DELTA),
            history=history or benchmark_history(),
        )

    name = "benchmark2d"
    d = 2
    r = 2
    p = 2
    q = 2

    def drift(self, x: np.ndarray, h: np.ndarray, theta: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        return np.stack([theta[0] * h[..., 1], theta[1] * h[..., 0]], axis=-1)

    def diffusion(self, x: np.ndarray, h: np.ndarray, beta: np.ndarray) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        out = np.zeros(h.shape[:-1] + (2, 2))
        out[..., 0, 0] = beta[0] * np.sqrt(1.0 + h[..., 1] ** 2)
        out[..., 1, 1] = beta[1] * np.sqrt(1.0 + h[..., 0] ** 2)
        return out


def builtin_benchmark() -> Benchmark2D:
    """The two-dimensional benchmark with its default box, delay and history."""
    return Benchmark2D()
