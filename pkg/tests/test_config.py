"""
Tests for config loading and validation.
"""

from pathlib import Path

import pytest
import yaml

from src.core.config import Config
from src.core.exceptions import ConfigurationError

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"

BASE = {
    "model": "benchmark2d",
    "theta_true": [1.0, 2.0, 3.0, 4.0],
    "simulation": {"n": 100, "epsilon": 0.1, "seed": 42},
    "experiment": {"cells": [[100, 0.1], [1000, 0.01]], "replications": 10},
}


def write_config(tmp_path, data, name="config.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


class TestLoad:
    def test_round_trip_of_defaults(self, tmp_path):
        config = Config.load(write_config(tmp_path, BASE))
        assert config.simulation.n == 100
        assert config.simulation.substeps == 1
        assert config.experiment.cells == [[100, 0.1], [1000, 0.01]]
        assert config.experiment.estimator == "closed_form"
        assert config.output.workers == 1
        assert config.box is None

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.yaml")), ids=lambda p: p.name)
    def test_shipped_configs_build(self, path):
        config = Config.load(path)
        model = config.build_model()
        assert model.box.contains(config.theta_true)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError, match="not found"):
            Config.load(tmp_path / "absent.yaml")

    def test_yaml_error_reports_line(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("model: benchmark2d\n\ttheta_true: [1, 2, 3, 4]\n")
        with pytest.raises(ConfigurationError) as excinfo:
            Config.load(path)
        assert excinfo.value.details["line"] == 2
        assert excinfo.value.exit_code == 2

    def test_environment_interpolation(self, tmp_path, monkeypatch):
        data = dict(BASE, output={"workers": "${SFDE_TEST_WORKERS:-1}"})
        path = write_config(tmp_path, data)
        assert Config.load(path).output.workers == 1
        monkeypatch.setenv("SFDE_TEST_WORKERS", "6")
        assert Config.load(path).output.workers == 6


class TestSchema:
    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigurationError, match="Unknown key 'sim'"):
            Config.from_dict(dict(BASE, sim={}))

    def test_unknown_section_key(self):
        with pytest.raises(ConfigurationError) as excinfo:
            Config.from_dict(dict(BASE, simulation={"n": 100, "epsilon": 0.1, "eps": 0.1}))
        assert excinfo.value.details["config_key"] == "simulation.eps"

    def test_missing_epsilon_is_named(self):
        with pytest.raises(ConfigurationError, match="simulation.epsilon"):
            Config.from_dict(dict(BASE, simulation={"n": 100}))

    def test_missing_model(self):
        data = {k: v for k, v in BASE.items() if k != "model"}
        with pytest.raises(ConfigurationError, match="'model'"):
            Config.from_dict(data)

    @pytest.mark.parametrize("epsilon", [0.0, -0.1, 1.5])
    def test_epsilon_range(self, epsilon):
        with pytest.raises(ConfigurationError):
            Config.from_dict(dict(BASE, simulation={"n": 100, "epsilon": epsilon}))

    def test_wrong_type(self):
        with pytest.raises(ConfigurationError) as excinfo:
            Config.from_dict(dict(BASE, simulation={"n": "many", "epsilon": 0.1}))
        assert excinfo.value.details["expected_type"] == "int"

    def test_full_width_seed_is_exact(self):
        seed = 2 ** 64 - 1
        config = Config.from_dict(dict(BASE, simulation={"n": 100, "epsilon": 0.1, "seed": seed}))
        assert config.simulation.seed == seed

    @pytest.mark.parametrize("estimator", ["bayes", ["closed_form"], {"name": "optimizer"}])
    def test_invalid_estimator(self, estimator):
        experiment = dict(BASE["experiment"], estimator=estimator)
        with pytest.raises(ConfigurationError) as excinfo:
            Config.from_dict(dict(BASE, experiment=experiment))
        assert excinfo.value.details["config_key"] == "experiment.estimator"

    def test_output_and_logging_default_when_absent(self):
        config = Config.from_dict(BASE)
        assert config.logging.level == "INFO"
        assert config.output.directory == "./output"

    def test_require(self):
        config = Config.from_dict({"model": "benchmark2d", "theta_true": [1, 2, 3, 4]})
        with pytest.raises(ConfigurationError, match="experiment"):
            config.require("experiment")


class TestHash:
    def test_stable_across_key_order(self):
        reordered = dict(reversed(list(BASE.items())))
        assert Config.from_dict(BASE).config_hash == Config.from_dict(reordered).config_hash

    def test_changes_with_content(self):
        other = dict(BASE, theta_true=[1.0, 2.0, 3.0, 4.5])
        assert Config.from_dict(BASE).config_hash != Config.from_dict(other).config_hash


class TestBuilders:
    def test_builtin_model(self):
        model = Config.from_dict(BASE).build_model()
        assert model.name == "benchmark2d"
        assert model.delay.delta == pytest.approx(0.1)

    def test_box_and_delay_overrides(self):
        data = dict(
            BASE,
            box={"alpha_lo": -20.0, "alpha_hi": 20.0, "beta_lo": 0.5, "beta_hi": [6.0, 8.0]},
            delay={"delta": 0.2, "atoms": [[0.2, 0.5]], "density": [[0.0, 0.2, 2.5]]},
        )
        model = Config.from_dict(data).build_model()
        assert model.box.alpha_lo == (-20.0, -20.0)
        assert model.box.beta_hi == (6.0, 8.0)
        assert model.delay.delta == pytest.approx(0.2)
        assert model.delay.total_mass == pytest.approx(1.0)

    def test_box_list_length(self):
        data = dict(BASE, box={"alpha_lo": [0.0], "alpha_hi": 5.0, "beta_lo": 0.1, "beta_hi": 10.0})
        with pytest.raises(ConfigurationError):
            Config.from_dict(data).build_model()

    def test_theta_length(self):
        with pytest.raises(ConfigurationError, match="4 entries"):
            Config.from_dict(dict(BASE, theta_true=[1.0, 2.0])).build_model()

    def test_theta_outside_box(self):
        with pytest.raises(ConfigurationError, match="outside"):
            Config.from_dict(dict(BASE, theta_true=[1.0, 2.0, 3.0, 40.0])).build_model()

    def test_unknown_model(self):
        with pytest.raises(ConfigurationError):
            Config.from_dict(dict(BASE, model="lorenz")).build_model()

    def test_experiment_plan_overrides(self):
        plan = Config.from_dict(BASE).experiment_plan(estimator="optimizer", master_seed=7)
        assert plan.estimator == "optimizer"
        assert plan.master_seed == 7
        assert plan.cells == ((100, 0.1), (1000, 0.01))
        assert plan.selected_diagnostics_cell == (1000, 0.01)
