"""Test fixtures for slag tests."""

import numpy as np
import pytest

from slag.grassmann import Frame, random_rational_frame
from slag.hypersurface import STANDARD, CoefficientVector
from slag.reallocus import RealLocusPoint, sample_locus


@pytest.fixture
def standard():
    return STANDARD


@pytest.fixture
def eq7():
    return CoefficientVector.preset("eq7")


@pytest.fixture
def eq8():
    return CoefficientVector.preset("eq8")


@pytest.fixture
def known_frame():
    """u = (0,1,0,0), u' = (1,0,1,0): eta = (-1,0,0,1,0,0)."""
    return Frame((0, 1, 0, 0), (1, 0, 1, 0))


@pytest.fixture
def known_point(known_frame):
    return RealLocusPoint.from_frame(STANDARD, known_frame)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def rational_frames():
    """Factory for seeded random rational frames."""

    def _create(count: int, seed: int = 0) -> list[Frame]:
        generator = np.random.default_rng(seed)
        return [random_rational_frame(generator) for _ in range(count)]

    return _create


@pytest.fixture(scope="session")
def standard_locus():
    """Small deterministic sample of the standard normalized locus."""
    return sample_locus(STANDARD, 20, seed=7)


@pytest.fixture
def sample_config():
    """Sample configuration dict."""
    return {
        "coefficients": {"preset": "eq1"},
        "sampling": {
            "n": 8,
            "seed": 7,
            "starts": 40,
            "m_bases": 3,
            "m_fiber": 8,
        },
        "tolerances": {"scale": 1.0},
        "output": {"directory": "out"},
        "runtime": {"workers": 1},
        "logging": {
            "level": "INFO",
            "format": "text",
            "file": "",
            "max_bytes": 10485760,
            "backup_count": 3,
        },
    }


@pytest.fixture
def sample_config_file(tmp_path, sample_config):
    """Create a temporary config file."""
    import yaml

    sample_config["output"]["directory"] = str(tmp_path / "out")
    config_file = tmp_path / "config.yaml"
    with open(config_file, "w") as f:
        yaml.dump(sample_config, f)
    return config_file
