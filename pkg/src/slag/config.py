"""Configuration management."""

import ast
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import yaml

from slag.hypersurface import PRESETS, CoefficientError, CoefficientVector


@dataclass
class CoefficientsConfig:
    """Coefficient vector config; explicit values win over the preset."""

    preset: str = "eq1"
    values: list[str] | None = None


@dataclass
class SamplingConfig:
    """Sampling and search sizes."""

    n: int = 100
    seed: int = 7
    starts: int = 10000
    m_bases: int = 20
    m_fiber: int = 64


@dataclass
class ToleranceConfig:
    """Tolerance config."""

    scale: float = 1.0


@dataclass
class OutputConfig:
    """Output config."""

    directory: str = "out"


@dataclass
class RuntimeConfig:
    """Runtime config."""

    workers: int = 1


@dataclass
class LoggingConfig:
    """Logging config."""

    level: str = "INFO"
    format: str = "text"
    file: str = ""
    max_bytes: int = 10 * 1024 * 1024
    backup_count: int = 3


@dataclass
class RunConfig:
    """Main configuration."""

    coefficients: CoefficientsConfig = field(default_factory=CoefficientsConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)

    def coefficient_vector(self) -> CoefficientVector:
        try:
            if self.coefficients.values is not None:
                return CoefficientVector.parse(self.coefficients.values)
            return CoefficientVector.preset(self.coefficients.preset)
        except CoefficientError as e:
            raise ConfigError(str(e)) from e

    def to_dict(self) -> dict:
        return asdict(self)


class ConfigError(Exception):
    """Configuration error."""

    pass


def _apply_env_overrides(config: dict, prefix: str = "SLAG_") -> None:
    """Apply environment variable overrides to config.

    Environment variables should be named like SLAG_xxx_yyy for nested keys.
    Example: SLAG_SAMPLING_N=500 -> config["sampling"]["n"] = 500

    For keys with underscores, the function will try to match existing keys first.
    Example: SLAG_SAMPLING_M_FIBER=32 -> config["sampling"]["m_fiber"] = 32
    """

    def _find_and_set_key(current: dict, parts: list[str], value: Any) -> bool:
        """Try to find and set a key by combining parts. Returns True if found."""
        if not parts:
            return False

        # greedy, longest first
        for i in range(len(parts), 0, -1):
            combined = "_".join(parts[:i])
            if combined in current:
                if i == len(parts):
                    current[combined] = value
                    return True
                if isinstance(current[combined], dict):
                    return _find_and_set_key(current[combined], parts[i:], value)
                return False

        if len(parts) == 1:
            current[parts[0]] = value
            return True

        if parts[0] not in current:
            current[parts[0]] = {}
        return _find_and_set_key(current[parts[0]], parts[1:], value)

    for key, value in os.environ.items():
        if not key.startswith(prefix):
            continue

        parts = key[len(prefix) :].lower().split("_")
        _find_and_set_key(config, parts, _parse_env_value(value))


def _parse_env_value(value: str) -> Any:
    """Parse environment variable value."""
    if value.lower() == "true":
        return True
    if value.lower() == "false":
        return False
    if value.isdigit():
        return int(value)
    try:
        return float(value)
    except ValueError:
        pass

    if value.startswith("[") and value.endswith("]"):
        try:
            return ast.literal_eval(value)
        except (ValueError, SyntaxError):
            pass

    return value


def config_from_dict(config_dict: dict) -> RunConfig:
    """Build a RunConfig from nested dicts; unknown keys are a ConfigError."""
    sections = {
        "coefficients": CoefficientsConfig,
        "sampling": SamplingConfig,
        "tolerances": ToleranceConfig,
        "output": OutputConfig,
        "runtime": RuntimeConfig,
        "logging": LoggingConfig,
    }
    unknown = set(config_dict) - set(sections)
    if unknown:
        raise ConfigError(f"Unknown config sections: {sorted(unknown)}")
    try:
        built = {name: cls(**(config_dict.get(name) or {})) for name, cls in sections.items()}
    except TypeError as e:
        raise ConfigError(f"Invalid config keys: {e}") from e
    return RunConfig(**built)


def load_config(config_path: str | None = "config.yaml") -> RunConfig:
    """Load configuration from YAML file with env overrides.

    ``None`` starts from the built-in defaults instead of a file.
    """
    if config_path is None:
        config_dict = RunConfig().to_dict()
    else:
        config_file = Path(config_path)
        if not config_file.exists():
            raise ConfigError(f"Config file not found: {config_path}")
        with open(config_file) as f:
            try:
                config_dict = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Malformed config file {config_path}: {e}") from e

    _apply_env_overrides(config_dict)
    return config_from_dict(config_dict)


def validate_config(config: RunConfig) -> None:
    """Validate configuration."""
    if config.coefficients.values is None and config.coefficients.preset not in PRESETS:
        raise ConfigError(
            f"coefficients.preset must be one of {sorted(PRESETS)}, "
            f"got {config.coefficients.preset!r}"
        )
    config.coefficient_vector()

    if config.sampling.n < 1:
        raise ConfigError("sampling.n must be at least 1")

    if config.sampling.starts < 1:
        raise ConfigError("sampling.starts must be at least 1")

    if config.sampling.m_bases < 1:
        raise ConfigError("sampling.m_bases must be at least 1")

    if config.sampling.m_fiber < 3:
        raise ConfigError("sampling.m_fiber must be at least 3")

    if config.tolerances.scale <= 0:
        raise ConfigError("tolerances.scale must be positive")

    if config.runtime.workers < 1:
        raise ConfigError("runtime.workers must be at least 1")

    if config.logging.level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ConfigError(f"logging.level {config.logging.level!r} is not a log level")
