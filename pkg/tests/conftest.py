"""
Shared fixtures and small models for the test suite.
"""

import numpy as np
import pytest

from src.delay.measure import DelayMeasure
from src.models.base import DeterministicHistory, ParameterBox, SFDEModel
from src.models.benchmark import BENCHMARK_THETA, builtin_benchmark


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo acceptance checks (deselect with -m 'not slow')")


def _constant(value):
    return lambda t: [value]


class LinearDelayModel(SFDEModel):
    """Scalar dX = alpha H(X) dt + eps beta dW with a point mass at delta."""

    name = "linear_delay"
    d = 1
    r = 1
    p = 1
    q = 1

    def __init__(self, delta: float = 0.5, phi_value: float = 1.0):
        super().__init__(
            box=ParameterBox((-5.0,), (5.0,), (0.01,), (10.0,)),
            delay=DelayMeasure.dirac(delta),
            history=DeterministicHistory(_constant(phi_value)),
        )

    def drift(self, x, h, theta):
        return theta[0] * np.asarray(h, dtype=float)

    def diffusion(self, x, h, beta):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1] + (1, 1), beta[0])


class ConstantDriftModel(SFDEModel):
    """Scalar dX = alpha dt + eps beta dW."""

    name = "constant_drift"
    d = 1
    r = 1
    p = 1
    q = 1

    def __init__(self):
        super().__init__(
            box=ParameterBox((-5.0,), (5.0,), (0.01,), (5.0,)),
            delay=DelayMeasure.dirac(0.5),
            history=DeterministicHistory(_constant(0.0)),
        )

    def drift(self, x, h, theta):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape, theta[0])

    def diffusion(self, x, h, beta):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1] + (1, 1), beta[0])


class CoupledModel(SFDEModel):
    """Three-dimensional model with a full lower-triangular diffusion."""

    name = "coupled3d"
    d = 3
    r = 3
    p = 3
    q = 3

    def __init__(self):
        super().__init__(
            box=ParameterBox.uniform(3, 3, 0.1, 5.0),
            delay=DelayMeasure(delta=0.2, atoms=((0.2, 0.5),), density_pieces=((0.0, 0.2, 2.5),)),
            history=DeterministicHistory(lambda t: [1.0 + t, 0.5 - t, 2.0]),
        )

    def drift(self, x, h, theta):
        h = np.asarray(h, dtype=float)
        return np.stack([-theta[0] * h[..., 1], theta[1] * h[..., 2], -theta[2] * h[..., 0]], axis=-1)

    def diffusion(self, x, h, beta):
        x = np.asarray(x, dtype=float)
        h = np.asarray(h, dtype=float)
        out = np.zeros(x.shape[:-1] + (3, 3))
        for i in range(3):
            out[..., i, i] = beta[i] * np.sqrt(1.0 + x[..., i] ** 2)
        out[..., 1, 0] = 0.3 * np.tanh(h[..., 0])
        out[..., 2, 0] = 0.2 * np.cos(x[..., 1])
        out[..., 2, 1] = 0.4 * np.tanh(h[..., 2])
        return out


@pytest.fixture
def benchmark():
    return builtin_benchmark()


@pytest.fixture
def theta_true():
    return np.array(BENCHMARK_THETA)


@pytest.fixture
def linear_model():
    return LinearDelayModel()


@pytest.fixture
def constant_model():
    return ConstantDriftModel()


@pytest.fixture
def coupled_model():
    return CoupledModel()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
