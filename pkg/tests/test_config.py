"""Tests for config module."""

import os

import pytest

from slag.config import (
    CoefficientsConfig,
    ConfigError,
    LoggingConfig,
    RunConfig,
    SamplingConfig,
    ToleranceConfig,
    _apply_env_overrides,
    _parse_env_value,
    config_from_dict,
    load_config,
    validate_config,
)


class TestSamplingConfig:
    def test_default_values(self):
        config = SamplingConfig()
        assert config.n == 100
        assert config.seed == 7
        assert config.starts == 10000
        assert config.m_bases == 20
        assert config.m_fiber == 64

    def test_custom_values(self):
        config = SamplingConfig(n=500, m_fiber=16)
        assert config.n == 500
        assert config.m_fiber == 16


class TestCoefficientsConfig:
    def test_preset(self):
        config = RunConfig(coefficients=CoefficientsConfig(preset="eq7"))
        assert config.coefficient_vector().to_strings()[5] == "-2"

    def test_values_win_over_preset(self):
        values = ["1", "1", "-1", "-2", "-2", "-2"]
        config = RunConfig(coefficients=CoefficientsConfig(preset="eq1", values=values))
        assert config.coefficient_vector().to_strings() == values

    def test_bad_values_are_config_errors(self):
        config = RunConfig(coefficients=CoefficientsConfig(values=["1"] * 6))
        with pytest.raises(ConfigError, match="opposite"):
            config.coefficient_vector()


class TestLoadConfig:
    def test_load_from_file(self, sample_config_file):
        config = load_config(str(sample_config_file))

        assert isinstance(config, RunConfig)
        assert config.coefficients.preset == "eq1"
        assert config.sampling.n == 8
        assert config.sampling.starts == 40
        assert config.output.directory.endswith("out")

    def test_defaults_without_file(self):
        config = load_config(None)

        assert config.sampling.n == 100
        assert config.tolerances.scale == 1.0
        assert config.logging.level == "INFO"

    def test_file_not_found(self):
        with pytest.raises(ConfigError, match="not found"):
            load_config("nonexistent.yaml")

    def test_malformed_file(self, tmp_path):
        config_file = tmp_path / "bad.yaml"
        config_file.write_text("sampling: [n: 3\n")

        with pytest.raises(ConfigError, match="Malformed"):
            load_config(str(config_file))

    def test_unknown_section(self, tmp_path):
        config_file = tmp_path / "extra.yaml"
        config_file.write_text("plots:\n  dpi: 150\n")

        with pytest.raises(ConfigError, match="Unknown config sections"):
            load_config(str(config_file))

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="Invalid config keys"):
            config_from_dict({"sampling": {"points": 3}})

    def test_empty_file(self, tmp_path):
        config_file = tmp_path / "empty.yaml"
        config_file.write_text("")

        assert load_config(str(config_file)).sampling.seed == 7

    def test_env_overrides(self, sample_config_file):
        os.environ["SLAG_SAMPLING_N"] = "120"
        os.environ["SLAG_SAMPLING_M_FIBER"] = "32"

        try:
            config = load_config(str(sample_config_file))
            assert config.sampling.n == 120
            assert config.sampling.m_fiber == 32
        finally:
            del os.environ["SLAG_SAMPLING_N"]
            del os.environ["SLAG_SAMPLING_M_FIBER"]

    def test_env_overrides_defaults(self):
        os.environ["SLAG_COEFFICIENTS_PRESET"] = "eq8"

        try:
            assert load_config(None).coefficients.preset == "eq8"
        finally:
            del os.environ["SLAG_COEFFICIENTS_PRESET"]


class TestValidateConfig:
    def test_valid_config(self):
        validate_config(RunConfig())

    def test_unknown_preset(self):
        config = RunConfig(coefficients=CoefficientsConfig(preset="eq2"))

        with pytest.raises(ConfigError, match="coefficients.preset must be one of"):
            validate_config(config)

    def test_zero_points(self):
        config = RunConfig(sampling=SamplingConfig(n=0))

        with pytest.raises(ConfigError, match="sampling.n must be at least 1"):
            validate_config(config)

    def test_short_fiber(self):
        config = RunConfig(sampling=SamplingConfig(m_fiber=2))

        with pytest.raises(ConfigError, match="m_fiber must be at least 3"):
            validate_config(config)

    def test_nonpositive_scale(self):
        config = RunConfig(tolerances=ToleranceConfig(scale=0.0))

        with pytest.raises(ConfigError, match="scale must be positive"):
            validate_config(config)

    def test_bad_log_level(self):
        config = RunConfig(logging=LoggingConfig(level="LOUD"))

        with pytest.raises(ConfigError, match="not a log level"):
            validate_config(config)


class TestApplyEnvOverrides:
    def test_string_override(self):
        config = {"coefficients": {"preset": "eq1"}}
        os.environ["SLAG_COEFFICIENTS_PRESET"] = "eq7"

        try:
            _apply_env_overrides(config)
            assert config["coefficients"]["preset"] == "eq7"
        finally:
            del os.environ["SLAG_COEFFICIENTS_PRESET"]

    def test_int_override(self):
        config = {"runtime": {"workers": 1}}
        os.environ["SLAG_RUNTIME_WORKERS"] = "4"

        try:
            _apply_env_overrides(config)
            assert config["runtime"]["workers"] == 4
        finally:
            del os.environ["SLAG_RUNTIME_WORKERS"]

    def test_float_override(self):
        config = {"tolerances": {"scale": 1.0}}
        os.environ["SLAG_TOLERANCES_SCALE"] = "2.5"

        try:
            _apply_env_overrides(config)
            assert config["tolerances"]["scale"] == 2.5
        finally:
            del os.environ["SLAG_TOLERANCES_SCALE"]

    def test_list_override(self):
        config = {"coefficients": {"values": None}}
        os.environ["SLAG_COEFFICIENTS_VALUES"] = '["1", "1", "-1", "-2", "-2", "-2"]'

        try:
            _apply_env_overrides(config)
            assert config["coefficients"]["values"] == ["1", "1", "-1", "-2", "-2", "-2"]
        finally:
            del os.environ["SLAG_COEFFICIENTS_VALUES"]

    def test_nested_key_with_underscore(self):
        config = {"logging": {"max_bytes": 10, "backup_count": 3}}
        os.environ["SLAG_LOGGING_BACKUP_COUNT"] = "5"

        try:
            _apply_env_overrides(config)
            assert config["logging"]["backup_count"] == 5
            assert config["logging"]["max_bytes"] == 10
        finally:
            del os.environ["SLAG_LOGGING_BACKUP_COUNT"]


class TestParseEnvValue:
    @pytest.mark.parametrize(
        "raw,expected",
        [("true", True), ("False", False), ("42", 42), ("1e-9", 1e-9), ("eq7", "eq7")],
    )
    def test_values(self, raw, expected):
        assert _parse_env_value(raw) == expected
