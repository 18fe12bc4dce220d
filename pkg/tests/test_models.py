"""
Tests for the model interface, parameter boxes and the registry.
"""

import numpy as np
import pytest

from src.core.exceptions import ConfigurationError, ModelViolationError, ValidationError
from src.delay.measure import DelayMeasure
from src.models import Benchmark2D, ParameterBox, checked_cholesky, get_model, list_models


class TestParameterBox:
    def test_uniform_box(self):
        box = ParameterBox.uniform(2, 2, 0.1, 10.0)
        assert (box.p, box.q) == (2, 2)
        np.testing.assert_allclose(box.center, [5.05] * 4)

    def test_contains_and_require(self):
        box = ParameterBox.uniform(1, 1, 0.0, 1.0)
        assert box.contains([0.0, 1.0])
        assert not box.contains([0.5, 1.5])
        assert not box.contains([0.5])
        with pytest.raises(ValidationError):
            box.require([2.0, 0.5], field="theta_true")

    def test_lo_must_be_below_hi(self):
        with pytest.raises(ValidationError):
            ParameterBox((1.0,), (1.0,), (0.1,), (2.0,))

    def test_needs_diffusion_parameter(self):
        with pytest.raises(ValidationError):
            ParameterBox((0.0,), (1.0,), (), ())


class TestCholesky:
    def test_indefinite_matrix_reports_index(self):
        factor, bad = checked_cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))
        assert factor is None
        assert bad == 0

    def test_batched_failure_index(self):
        batch = np.stack([np.eye(2), np.eye(2), np.diag([1.0, 1e-14])])
        factor, bad = checked_cholesky(batch)
        assert factor is None
        assert bad == 2

    def test_factor_reconstructs(self, rng):
        a = rng.normal(size=(3, 3))
        matrix = a @ a.T + np.eye(3)
        factor, bad = checked_cholesky(matrix)
        assert bad is None
        np.testing.assert_allclose(factor @ factor.T, matrix, rtol=1e-12)


class TestBenchmark:
    def test_registry(self):
        assert "benchmark2d" in list_models()
        model = get_model("Benchmark2D")
        assert isinstance(model, Benchmark2D)
        assert model.delay == DelayMeasure.dirac(0.1)

    def test_unknown_model(self):
        with pytest.raises(ConfigurationError) as excinfo:
            get_model("nope")
        assert excinfo.value.details["config_key"] == "model"

    def test_coefficients(self, benchmark, theta_true):
        x = np.array([0.3, -0.2])
        h = np.array([0.5, 2.0])
        np.testing.assert_allclose(benchmark.drift(x, h, theta_true), [1.0 * 2.0, 2.0 * 0.5])
        sigma = benchmark.diffusion(x, h, theta_true[2:])
        np.testing.assert_allclose(sigma, np.diag([3.0 * np.sqrt(5.0), 4.0 * np.sqrt(1.25)]))

    def test_coefficients_broadcast(self, benchmark, theta_true, rng):
        x = rng.normal(size=(7, 2))
        h = rng.normal(size=(7, 2))
        assert benchmark.drift(x, h, theta_true).shape == (7, 2)
        assert benchmark.sigma_sigma_t(x, h, theta_true[2:]).shape == (7, 2, 2)

    def test_coordinate_names(self, benchmark):
        assert benchmark.coordinate_names == ("alpha1", "alpha2", "beta1", "beta2")

    def test_singular_diffusion(self, benchmark):
        with pytest.raises(ModelViolationError) as excinfo:
            benchmark.check_sigma_pd([0.0, 0.0], [1.0, 1.0], [0.0, 4.0])
        assert excinfo.value.details["beta"] == [0.0, 4.0]
        assert excinfo.value.exit_code == 3

    def test_drift_odd_and_diffusion_even_in_h(self, benchmark, theta_true, rng):
        x = rng.normal(size=(25, 2))
        h = rng.normal(scale=3.0, size=(25, 2))
        np.testing.assert_array_equal(benchmark.drift(x, -h, theta_true), -benchmark.drift(x, h, theta_true))
        np.testing.assert_array_equal(
            benchmark.diffusion(x, -h, theta_true[2:]), benchmark.diffusion(x, h, theta_true[2:])
        )

    def test_sigma_positive_definite_across_the_box(self, benchmark, rng):
        box = benchmark.box
        corners = [[b1, b2] for b1 in (box.beta_lo[0], box.beta_hi[0]) for b2 in (box.beta_lo[1], box.beta_hi[1])]
        betas = corners + rng.uniform(box.beta_lo, box.beta_hi, size=(20, 2)).tolist()
        for beta in betas:
            for h in ([0.0, 0.0], [1e6, -1e6], rng.normal(scale=10.0, size=2)):
                factor = benchmark.check_sigma_pd([0.0, 0.0], h, beta)
                assert np.all(np.diag(factor) > 0.0)

    def test_split(self, benchmark, theta_true):
        alpha, beta = benchmark.split(theta_true)
        np.testing.assert_array_equal(alpha, [1.0, 2.0])
        np.testing.assert_array_equal(beta, [3.0, 4.0])
        with pytest.raises(ValidationError):
            benchmark.split([1.0, 2.0, 3.0])

    def test_variants_leave_original_untouched(self, benchmark):
        delay = DelayMeasure.uniform(0.1, height=10.0)
        variant = benchmark.with_delay(delay).with_box(ParameterBox.uniform(2, 2, 0.5, 5.0))
        assert variant.delay == delay
        assert variant.box.alpha_lo == (0.5, 0.5)
        assert benchmark.delay == DelayMeasure.dirac(0.1)

    def test_box_dimension_mismatch(self, benchmark):
        with pytest.raises(ValidationError):
            benchmark.with_box(ParameterBox.uniform(1, 2, 0.1, 1.0))
