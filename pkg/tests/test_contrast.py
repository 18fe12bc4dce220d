"""
Tests for the local-Gauss contrast.
"""

import numpy as np
import pytest

from src.core.exceptions import DomainError, ModelViolationError, NonFiniteError
from src.delay.measure import DelayMeasure
from src.estimation.contrast import (
    ContrastWorkspace,
    contrast,
    contrast_gradient,
    contrast_parts,
    residual_pk,
    residuals,
)
from src.models.base import DeterministicHistory, ParameterBox, SFDEModel
from src.simulation import SimConfig, simulate_path


class PureNoiseModel(SFDEModel):
    """Scalar dX = eps beta dW; alpha enters nowhere."""

    name = "pure_noise"
    d = 1
    r = 1
    p = 1
    q = 1

    def __init__(self):
        super().__init__(
            box=ParameterBox((-5.0,), (5.0,), (0.01,), (5.0,)),
            delay=DelayMeasure.dirac(0.5),
            history=DeterministicHistory(lambda t: [0.0]),
        )

    def drift(self, x, h, theta):
        return np.zeros_like(np.asarray(x, dtype=float))

    def diffusion(self, x, h, beta):
        x = np.asarray(x, dtype=float)
        return np.full(x.shape[:-1] + (1, 1), beta[0])


def naive_contrast(ws, model, theta, epsilon):
    """Direct determinant and inverse, one step at a time."""
    _, beta = model.split(theta)
    total = 0.0
    for k in range(ws.steps):
        xi = model.sigma_sigma_t(ws.states[k], ws.precomputed_h[k], beta)
        p = ws.increments[k] - model.drift(ws.states[k], ws.precomputed_h[k], theta) / ws.n
        total += np.log(np.linalg.det(xi)) + ws.n / epsilon ** 2 * p @ np.linalg.inv(xi) @ p
    return total


def toy_workspace():
    return ContrastWorkspace(
        states=np.zeros((2, 1)),
        precomputed_h=np.zeros((2, 1)),
        increments=np.array([[0.5], [1.0]]),
        n=2,
    )


@pytest.fixture
def benchmark_ws(benchmark, theta_true):
    path = simulate_path(benchmark, SimConfig(n=200, epsilon=0.1, seed=17), theta_true)
    return ContrastWorkspace.from_path(path, benchmark.delay)


@pytest.fixture
def coupled_ws(coupled_model):
    theta = np.array([1.0, 0.5, 2.0, 0.8, 1.2, 0.6])
    path = simulate_path(coupled_model, SimConfig(n=50, epsilon=0.2, seed=4), theta)
    return ContrastWorkspace.from_path(path, coupled_model.delay)


class TestWorkspace:
    def test_shapes(self, benchmark_ws):
        assert benchmark_ws.steps == 200
        assert benchmark_ws.precomputed_h.shape == (200, 2)

    def test_arrays_are_read_only(self, benchmark_ws):
        with pytest.raises(ValueError):
            benchmark_ws.increments[0, 0] = 0.0

    def test_delay_mismatch(self, benchmark, theta_true):
        from src.delay.measure import DelayMeasure

        path = simulate_path(benchmark, SimConfig(n=100, epsilon=0.1), theta_true)
        with pytest.raises(DomainError):
            ContrastWorkspace.from_path(path, DelayMeasure.dirac(0.2))

    def test_lengths_must_agree(self):
        with pytest.raises(DomainError):
            ContrastWorkspace(np.zeros((3, 1)), np.zeros((2, 1)), np.zeros((3, 1)), n=3)


class TestResiduals:
    def test_residual_pk_matches_batch(self, benchmark_ws, benchmark, theta_true):
        batch = residuals(benchmark_ws, benchmark, theta_true)
        for k in (1, 57, 200):
            np.testing.assert_allclose(residual_pk(benchmark_ws, benchmark, k, theta_true), batch[k - 1], rtol=1e-14)

    @pytest.mark.parametrize("k", [0, 201])
    def test_index_out_of_range(self, benchmark_ws, benchmark, theta_true, k):
        with pytest.raises(DomainError):
            residual_pk(benchmark_ws, benchmark, k, theta_true)


class TestContrast:
    def test_cholesky_matches_naive(self, coupled_ws, coupled_model):
        theta = np.array([0.7, 1.3, 1.1, 0.9, 1.0, 0.4])
        value = contrast(coupled_ws, coupled_model, theta, 0.2)
        assert value == pytest.approx(naive_contrast(coupled_ws, coupled_model, theta, 0.2), rel=1e-10)

    def test_additive_over_steps(self, benchmark_ws, benchmark, theta_true):
        whole = contrast(benchmark_ws, benchmark, theta_true, 0.1)
        head = contrast(benchmark_ws.slice(0, 80), benchmark, theta_true, 0.1)
        tail = contrast(benchmark_ws.slice(80, 200), benchmark, theta_true, 0.1)
        assert whole == pytest.approx(head + tail, rel=1e-12)

    def test_noise_level_scales_only_the_quadratic_part(self, benchmark_ws, benchmark, theta_true):
        logdet, quad = contrast_parts(benchmark_ws, benchmark, theta_true, 0.1)
        assert contrast_parts(benchmark_ws, benchmark, theta_true, 0.05) == (logdet, quad)
        difference = contrast(benchmark_ws, benchmark, theta_true, 0.05) - contrast(benchmark_ws, benchmark, theta_true, 0.1)
        assert difference == pytest.approx(200 * quad * (1 / 0.05 ** 2 - 1 / 0.1 ** 2), rel=1e-10)

    def test_singular_diffusion(self, benchmark_ws, benchmark):
        with pytest.raises(ModelViolationError) as excinfo:
            contrast(benchmark_ws, benchmark, [1.0, 2.0, 0.0, 4.0], 0.1)
        assert excinfo.value.details["beta"] == [0.0, 4.0]

    def test_overflow(self, constant_model):
        ws = ContrastWorkspace(np.zeros((2, 1)), np.zeros((2, 1)), np.array([[1e200], [1e200]]), n=2)
        with pytest.raises(NonFiniteError):
            with np.errstate(over="ignore"):
                contrast(ws, constant_model, [0.0, 1.0], 1.0)

    def test_toy_value(self, constant_model):
        # log(0.25) twice plus 2 * (0.0^2 + 0.5^2) / 0.25
        assert contrast(toy_workspace(), constant_model, [1.0, 0.5], 1.0) == pytest.approx(2 * np.log(0.25) + 2.0)


    def test_pure_noise_model_ignores_alpha(self, rng):
        model = PureNoiseModel()
        ws = ContrastWorkspace(
            states=rng.normal(size=(30, 1)),
            precomputed_h=rng.normal(size=(30, 1)),
            increments=rng.normal(scale=0.1, size=(30, 1)),
            n=30,
        )
        values = [contrast(ws, model, [alpha, 0.7], 0.2) for alpha in (-4.0, 0.0, 2.5)]
        assert values[0] == values[1] == values[2]

class TestGradient:
    def test_matches_analytic_gradient(self, constant_model):
        gradient = contrast_gradient(toy_workspace(), constant_model, [1.0, 0.5], 1.0)
        np.testing.assert_allclose(gradient, [-4.0, 0.0], atol=1e-5)

    def test_one_sided_at_the_boundary(self, constant_model):
        gradient = contrast_gradient(toy_workspace(), constant_model, [5.0, 0.5], 1.0)
        assert gradient[0] == pytest.approx(28.0, rel=1e-5)

    def test_coordinate_swap_permutes_the_gradient(self, benchmark_ws, benchmark):
        theta = np.array([1.2, 2.1, 2.8, 4.3])
        swapped_ws = ContrastWorkspace(
            states=np.ascontiguousarray(benchmark_ws.states[:, ::-1]),
            precomputed_h=np.ascontiguousarray(benchmark_ws.precomputed_h[:, ::-1]),
            increments=np.ascontiguousarray(benchmark_ws.increments[:, ::-1]),
            n=benchmark_ws.n,
        )
        swapped_theta = theta[[1, 0, 3, 2]]
        assert contrast(swapped_ws, benchmark, swapped_theta, 0.1) == pytest.approx(
            contrast(benchmark_ws, benchmark, theta, 0.1), rel=1e-12
        )
        gradient = contrast_gradient(benchmark_ws, benchmark, theta, 0.1)
        swapped_gradient = contrast_gradient(swapped_ws, benchmark, swapped_theta, 0.1)
        np.testing.assert_allclose(swapped_gradient, gradient[[1, 0, 3, 2]], rtol=1e-5, atol=1e-4)
