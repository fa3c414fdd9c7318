"""Command-line entry point for the slag verification toolkit."""

import argparse
import sys

from slag import __version__
from slag.config import ConfigError, RunConfig, load_config, validate_config
from slag.hypersurface import PRESETS, CoefficientError
from slag.logger import get_logger, setup_logging
from slag.pipeline import VerificationPipeline
from slag.reallocus import SamplingError

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NONCONVERGENCE = 2
EXIT_CONFIG = 3

COMMANDS = {
    "atlas-check": "certify the chart transition identities exactly",
    "smoothness": "search all six charts for singular points (evidence)",
    "sample": "sample the normalized real locus and write point clouds",
    "verify": "check the special Lagrangian and bundle structure on samples",
    "fibration": "sample circle fibers over the base and write fiber curves",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slag", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--preset", choices=sorted(PRESETS), help="named coefficient vector")
    source.add_argument("--config", metavar="PATH", help="YAML configuration file")
    common.add_argument("--n", type=int, help="number of locus samples")
    common.add_argument("--seed", type=int, help="base random seed")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--starts", type=int, help="Newton starts per chart")
    common.add_argument("--tol-scale", type=float, help="multiplier for every tolerance")
    common.add_argument("--workers", type=int, help="worker threads (or SLAG_RUNTIME_WORKERS)")

    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        subparser = subparsers.add_parser(name, parents=[common], help=help_text)
        if name == "fibration":
            subparser.add_argument("--bases", type=int, help="number of base points")
            subparser.add_argument("--fiber", type=int, help="samples per fiber (at least 3)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Config file (or defaults) with env overrides, then CLI flags on top."""
    config = load_config(args.config)
    if args.preset:
        config.coefficients.preset = args.preset
        config.coefficients.values = None

    overrides = {
        ("sampling", "n"): args.n,
        ("sampling", "seed"): args.seed,
        ("sampling", "starts"): args.starts,
        ("sampling", "m_bases"): getattr(args, "bases", None),
        ("sampling", "m_fiber"): getattr(args, "fiber", None),
        ("tolerances", "scale"): args.tol_scale,
        ("runtime", "workers"): args.workers,
        ("output", "directory"): args.out,
    }
    for (section, key), value in overrides.items():
        if value is not None:
            setattr(getattr(config, section), key, value)

    validate_config(config)
    return config


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except (ConfigError, CoefficientError) as e:
        print(f"Configuration error: {e}")
        return EXIT_CONFIG

    setup_logging(
        level=config.logging.level,
        format_=config.logging.format,
        log_file=config.logging.file or None,
        max_bytes=config.logging.max_bytes,
        backup_count=config.logging.backup_count,
        context={
            "command": args.command,
            "preset": "custom" if config.coefficients.values else config.coefficients.preset,
        },
    )

    logger.info(f"Starting slag v{__version__}: {args.command}")

    try:
        report = VerificationPipeline(config).run(args.command)
    except (ConfigError, CoefficientError) as e:
        print(f"Configuration error: {e}")
        return EXIT_CONFIG
    except SamplingError as e:
        logger.error(f"Sampler did not converge: {e}")
        print(f"Sampling error: {e}")
        return EXIT_NONCONVERGENCE

    print(report.summary())
    return EXIT_OK if report.status == "pass" else EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
