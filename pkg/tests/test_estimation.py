"""
Tests for minimum contrast estimation and the benchmark closed form.
"""

import numpy as np
import pytest

from src.core.exceptions import DomainError, OptimizationFailedError, ValidationError
from src.estimation import (
    ContrastWorkspace,
    closed_form_benchmark,
    closed_form_from_workspace,
    contrast,
    contrast_gradient,
    minimize_contrast,
)
from src.estimation.optimizer import projected_gradient
from src.simulation import SimConfig, derive_seed, simulate_path

from .test_contrast import toy_workspace


def benchmark_path(model, theta, seed, n=100, epsilon=0.1):
    return simulate_path(model, SimConfig(n=n, epsilon=epsilon, seed=seed), theta)


class TestOptimizer:
    def test_toy_optimum(self, constant_model):
        result = minimize_contrast(toy_workspace(), constant_model, 1.0)
        assert result.converged
        assert result.theta_hat[0] == pytest.approx(1.5, abs=1e-5)
        assert result.theta_hat[1] == pytest.approx(np.sqrt(0.125), abs=1e-5)
        assert constant_model.box.contains(result.theta_hat)
        assert result.details["start"] == pytest.approx([0.0, 2.505])

    def test_optimum_on_the_boundary(self, constant_model):
        ws = ContrastWorkspace(np.zeros((2, 1)), np.zeros((2, 1)), np.array([[10.0], [10.0]]), n=2)
        result = minimize_contrast(ws, constant_model, 1.0)
        assert result.theta_hat[0] == pytest.approx(5.0, abs=1e-6)

    def test_warm_start(self, constant_model):
        result = minimize_contrast(toy_workspace(), constant_model, 1.0, start=[1.5, 0.35])
        assert result.theta_hat[0] == pytest.approx(1.5, abs=1e-5)

    def test_start_outside_box(self, constant_model):
        with pytest.raises(ValidationError) as excinfo:
            minimize_contrast(toy_workspace(), constant_model, 1.0, start=[9.0, 1.0])
        assert excinfo.value.details["field"] == "start"

    def test_all_evaluations_fail(self, benchmark):
        # every residual overflows
        ws = ContrastWorkspace(np.zeros((3, 2)), np.zeros((3, 2)), np.full((3, 2), 1e200), n=3)
        with pytest.raises(OptimizationFailedError):
            with np.errstate(over="ignore", invalid="ignore"):
                minimize_contrast(ws, benchmark, 1.0)

    def test_to_row(self, constant_model):
        result = minimize_contrast(toy_workspace(), constant_model, 1.0)
        row = result.to_row(constant_model.coordinate_names)
        assert list(row) == ["alpha1", "beta1", "contrast", "converged"]
        assert row["converged"] is True

    def test_projected_gradient(self):
        theta = np.array([0.0, 1.0, 0.5])
        gradient = np.array([1.0, -1.0, 1.0])
        projected = projected_gradient(theta, gradient, np.zeros(3), np.ones(3))
        np.testing.assert_array_equal(projected, [0.0, 0.0, 1.0])

    def test_never_worse_than_the_start(self, benchmark, theta_true):
        path = benchmark_path(benchmark, theta_true, seed=31)
        ws = ContrastWorkspace.from_path(path, benchmark.delay)
        for start in (None, [0.5, 6.0, 1.0, 9.0], [8.0, 0.3, 5.0, 2.0]):
            result = minimize_contrast(ws, benchmark, 0.1, start=start)
            assert result.contrast_value <= contrast(ws, benchmark, result.details["start"], 0.1)

    def test_independent_of_the_start(self, benchmark, theta_true):
        path = benchmark_path(benchmark, theta_true, seed=32)
        ws = ContrastWorkspace.from_path(path, benchmark.delay)
        first = minimize_contrast(ws, benchmark, 0.1, start=[2.0, 3.0, 2.0, 5.0]).theta_hat
        second = minimize_contrast(ws, benchmark, 0.1, start=[0.5, 1.0, 6.0, 2.0]).theta_hat
        np.testing.assert_allclose(first, second, atol=1e-4)


class TestClosedForm:
    def test_stationary_point_of_the_contrast(self, benchmark, theta_true):
        path = benchmark_path(benchmark, theta_true, seed=21)
        ws = ContrastWorkspace.from_path(path, benchmark.delay)
        theta_hat = closed_form_from_workspace(ws, 0.1)
        value = contrast(ws, benchmark, theta_hat, 0.1)
        gradient = contrast_gradient(ws, benchmark, theta_hat, 0.1)
        assert np.linalg.norm(gradient) <= 1e-3 * (1.0 + abs(value))
        for i in range(4):
            for shift in (-1e-3, 1e-3):
                moved = theta_hat.copy()
                moved[i] += shift
                assert contrast(ws, benchmark, moved, 0.1) > value

    def test_diffusion_profile(self, benchmark, theta_true):
        # With alpha and beta2 fixed, U(beta1) = n log beta1^2 + C / beta1^2 + const,
        # minimized at beta1^2 = C / n; C follows from two evaluations.
        path = benchmark_path(benchmark, theta_true, seed=8)
        ws = ContrastWorkspace.from_path(path, benchmark.delay)
        theta_hat = closed_form_from_workspace(ws, 0.1)
        at = lambda b1: contrast(ws, benchmark, [theta_hat[0], theta_hat[1], b1, theta_hat[3]], 0.1)
        n = ws.steps
        c = (at(1.0) - at(2.0) + n * np.log(4.0)) * 4.0 / 3.0
        assert theta_hat[2] == pytest.approx(np.sqrt(c / n), rel=1e-8)

    def test_agrees_with_optimizer(self, benchmark, theta_true):
        for j in range(3):
            path = benchmark_path(benchmark, theta_true, seed=derive_seed(99, 100, 0.1, j))
            ws = ContrastWorkspace.from_path(path, benchmark.delay)
            closed = closed_form_from_workspace(ws, 0.1)
            optimized = minimize_contrast(ws, benchmark, 0.1).theta_hat
            assert np.max(np.abs(closed - optimized)) <= 1e-4

    def test_path_entry_point(self, benchmark, theta_true):
        path = benchmark_path(benchmark, theta_true, seed=2)
        ws = ContrastWorkspace.from_path(path, benchmark.delay)
        np.testing.assert_array_equal(closed_form_benchmark(path), closed_form_from_workspace(ws, 0.1))

    def test_zero_noise_gives_nan_diffusion(self, benchmark, theta_true):
        path = benchmark_path(benchmark, theta_true, seed=2, epsilon=0.0)
        estimate = closed_form_benchmark(path)
        assert np.all(np.isfinite(estimate[:2]))
        assert np.all(np.isnan(estimate[2:]))

    def test_zero_noise_recovers_drift_on_the_grid(self, benchmark, theta_true):
        # Euler increments are exactly alpha * H_n / n without noise
        path = benchmark_path(benchmark, theta_true, seed=2, epsilon=0.0)
        np.testing.assert_allclose(closed_form_benchmark(path)[:2], theta_true[:2], rtol=1e-10)

    def test_degenerate_design(self):
        ws = ContrastWorkspace(np.zeros((4, 2)), np.zeros((4, 2)), np.ones((4, 2)), n=4)
        with pytest.raises(DomainError, match="Degenerate"):
            closed_form_from_workspace(ws, 0.1)

    def test_needs_two_dimensions(self):
        with pytest.raises(DomainError):
            closed_form_from_workspace(toy_workspace(), 0.1)

    @pytest.mark.slow
    def test_agrees_with_optimizer_on_many_paths(self, benchmark, theta_true):
        # the closed form is unconstrained; compare only where it lands inside the box
        compared = 0
        for j in range(30):
            path = benchmark_path(benchmark, theta_true, seed=derive_seed(2024, 1000, 0.01, j), n=1000, epsilon=0.01)
            ws = ContrastWorkspace.from_path(path, benchmark.delay)
            closed = closed_form_from_workspace(ws, 0.01)
            if not benchmark.box.contains(closed):
                continue
            optimized = minimize_contrast(ws, benchmark, 0.01).theta_hat
            assert np.max(np.abs(closed - optimized)) <= 1e-4
            compared += 1
        assert compared >= 25
