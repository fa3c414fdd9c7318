"""Tests for the command-line entry point."""

import json

import pytest

from slag.main import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    build_parser,
    main,
    resolve_config,
)
from slag.reallocus import SamplingError


class TestParser:
    def test_commands(self):
        parser = build_parser()

        for command in ("atlas-check", "smoothness", "sample", "verify", "fibration"):
            assert parser.parse_args([command]).command == command

    def test_preset_and_config_are_exclusive(self):
        with pytest.raises(SystemExit) as excinfo:
            build_parser().parse_args(["sample", "--preset", "eq7", "--config", "x.yaml"])

        assert excinfo.value.code == 2

    def test_unknown_preset(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sample", "--preset", "eq2"])

    def test_fiber_flags_only_on_fibration(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sample", "--fiber", "8"])


class TestResolveConfig:
    def test_flags_override_file(self, sample_config_file):
        args = build_parser().parse_args(
            ["fibration", "--config", str(sample_config_file), "--n", "3", "--fiber", "16"]
        )

        config = resolve_config(args)

        assert config.sampling.n == 3
        assert config.sampling.m_fiber == 16
        assert config.sampling.starts == 40

    def test_preset_clears_values(self):
        args = build_parser().parse_args(["sample", "--preset", "eq8", "--tol-scale", "2"])

        config = resolve_config(args)

        assert config.coefficients.preset == "eq8"
        assert config.coefficients.values is None
        assert config.tolerances.scale == 2.0


class TestMain:
    def test_sample_passes(self, tmp_path, capsys):
        code = main(["sample", "--n", "4", "--out", str(tmp_path)])

        assert code == EXIT_OK
        assert "sample: PASS" in capsys.readouterr().out
        assert json.loads((tmp_path / "report.json").read_text())["status"] == "pass"

    def test_verify_eq8(self, tmp_path):
        assert main(["verify", "--preset", "eq8", "--n", "4", "--out", str(tmp_path)]) == EXIT_OK

    def test_smoothness_finds_singular_points(self, sample_config_file, capsys):
        code = main(["smoothness", "--config", str(sample_config_file), "--starts", "16"])

        assert code == EXIT_FAILURE
        out = capsys.readouterr().out
        assert "smoothness: FAIL (evidence)" in out
        assert "FAIL no singular witnesses in U01" in out

    def test_eq7_reports(self, tmp_path):
        assert main(["sample", "--preset", "eq7", "--n", "4", "--out", str(tmp_path)]) == EXIT_OK
        assert json.loads((tmp_path / "report.json").read_text())["status"] == "pass"

    def test_fibration_without_bases(self, tmp_path):
        assert main(["fibration", "--bases", "0", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_zero_points(self, tmp_path, capsys):
        code = main(["sample", "--n", "0", "--out", str(tmp_path)])

        assert code == EXIT_CONFIG
        assert "Configuration error" in capsys.readouterr().out

    def test_short_fiber(self, tmp_path):
        assert main(["fibration", "--fiber", "2", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_missing_config_file(self, tmp_path):
        assert main(["sample", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG

    def test_fibration_needs_standard(self, tmp_path):
        assert main(["fibration", "--preset", "eq7", "--out", str(tmp_path)]) == EXIT_CONFIG

    def test_nonconvergence(self, tmp_path, monkeypatch):
        def fail(self, command, **options):
            raise SamplingError("sampler did not converge for point 0 after 10 redraws")

        monkeypatch.setattr("slag.main.VerificationPipeline.run", fail)

        assert main(["sample", "--out", str(tmp_path)]) == EXIT_NONCONVERGENCE

    def test_failed_check(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setattr("slag.pipeline.HYPERSURFACE_TOLERANCE", 0.0)

        code = main(["sample", "--n", "4", "--out", str(tmp_path)])

        assert code == EXIT_FAILURE
        assert "FAIL points lie on the hypersurface" in capsys.readouterr().out
