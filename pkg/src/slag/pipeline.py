"""Verification pipelines behind the slag subcommands."""

from collections.abc import Callable, Mapping, Sequence
from dataclasses import replace
from pathlib import Path

import numpy as np

from slag.config import ConfigError, RunConfig
from slag.exactpoly import parse_expression
from slag.grassmann import (
    CHARTS,
    ZETA,
    GrassmannError,
    check_cocycle,
    check_equivariance,
    check_quadric,
    check_round_trip,
    verify_transition_jacobians,
)
from slag.hypersurface import (
    PRESETS,
    RESIDUAL_TOLERANCE,
    STANDARD,
    CoefficientVector,
    HypersurfaceError,
    NewtonSettings,
    chart_consistency_failures,
    chart_expression,
    critical_point_search,
    gradient_system,
    quartic_dictionary_failures,
    smoothness_search,
)
from slag.logger import chart_label, get_logger
from slag.quotient import QuotientError, bundle_projection_consistency, z4_coset
from slag.reallocus import (
    LOCUS_TOLERANCE,
    SYMPLECTIC_TOLERANCE,
    DegenerateBaseError,
    LocusError,
    RealLocusPoint,
    alternate_system_eq8,
    base_projection,
    complexified_basis,
    complexified_control,
    eta_distance,
    fiber_point,
    fiber_samples,
    line_angle_spread,
    loop_closure_ratio,
    normalize_base,
    overlap_residue_gap,
    pivot_gap,
    projective_angle,
    projective_class,
    renormalize,
    rotated_basis,
    sample_locus,
    submersion_check,
    summarize,
    symplectic_residual,
    tangent_basis,
    volume_form_value,
)
from slag.report import (
    CheckResult,
    Report,
    statistics,
    write_fibers_csv,
    write_locus_csv,
    write_locus_records,
)

logger = get_logger(__name__)

HYPERSURFACE_TOLERANCE = 1e-9
PHASE_SPREAD_TOLERANCE = 1e-6
PIVOT_TOLERANCE = 1e-8
OVERLAP_TOLERANCE = 1e-8
CLOSURE_TOLERANCE = 1e-10
BUNDLE_TOLERANCE = 1e-9
FIBER_CLOSURE_RATIO = 2.0
BASE_TOLERANCE = 1e-10
BASE_SEPARATION = 1e-6
CONTROL_THRESHOLD = 1e-3
TOY_STARTS = 50

STANDARD_CHART_EXPRESSION = (
    "1 + zeta1^4 + zeta2^4 - zeta3^4 - zeta4^4 - (zeta1*zeta4 - zeta2*zeta3)^4"
)
STANDARD_GRADIENT_SYSTEM = (
    "zeta1^3 - zeta4*(zeta1*zeta4 - zeta2*zeta3)^3",
    "zeta2^3 + zeta3*(zeta1*zeta4 - zeta2*zeta3)^3",
    "-zeta3^3 + zeta2*(zeta1*zeta4 - zeta2*zeta3)^3",
    "-zeta4^3 - zeta1*(zeta1*zeta4 - zeta2*zeta3)^3",
)
KNOWN_POINT_ETA = (-1.0, 0.0, 0.0, 1.0, 0.0, 0.0)

NON_STANDARD_DETAIL = "structure differs from eq1"

MEASUREMENT_ERRORS = (
    LocusError,
    HypersurfaceError,
    QuotientError,
    GrassmannError,
    ArithmeticError,
    np.linalg.LinAlgError,
)

POINT_MEASURES = (
    "locus residual",
    "hypersurface residual",
    "submersion rank",
    "symplectic residual",
    "complexified control",
    "complexified symplectic",
    "line angle",
    "rotated line angle",
    "phase deviation",
    "pivot gap",
    "overlap gap",
    "base projection",
    "z4 closure",
    "bundle consistency",
)


def preset_name(c: CoefficientVector) -> str | None:
    """Name of the preset equal to c, if any."""
    for name in PRESETS:
        if c == CoefficientVector.preset(name):
            return name
    return None


def _attempt(measures: dict[str, float], name: str, function: Callable[[], float]) -> None:
    try:
        measures[name] = float(function())
    except MEASUREMENT_ERRORS as e:
        logger.warning(f"{name} failed: {e}")
        measures[name] = float("inf")


def measure_point(point: RealLocusPoint) -> dict[str, float]:
    """Every per-point quantity verify aggregates.

    A failed measurement is inf; a pivot gap that does not apply is nan.
    """
    measures: dict[str, float] = {}
    _attempt(
        measures,
        "locus residual",
        lambda: max(abs(v - 1) for v in point.system.values(point.eta)),
    )
    _attempt(measures, "hypersurface residual", point.hypersurface_residual)
    _attempt(measures, "submersion rank", lambda: submersion_check(point).rank)

    try:
        basis = tangent_basis(point)
    except MEASUREMENT_ERRORS as e:
        logger.warning(f"tangent basis failed: {e}")
        basis = None

    if basis is not None:
        _attempt(
            measures, "symplectic residual", lambda: symplectic_residual(point, basis).max_residual
        )
        _attempt(measures, "complexified control", lambda: complexified_control(point, basis))
        _attempt(
            measures,
            "complexified symplectic",
            lambda: symplectic_residual(point, complexified_basis(basis)).max_residual,
        )
        try:
            largest = volume_form_value(point, basis)
            measures["line angle"] = largest.line_angle
            measures["phase deviation"] = largest.deviation
        except MEASUREMENT_ERRORS as e:
            logger.warning(f"volume form failed: {e}")
        _attempt(
            measures,
            "rotated line angle",
            lambda: volume_form_value(point, rotated_basis(basis)).line_angle,
        )
        try:
            gap = pivot_gap(point, basis)
            # nan marks a point with a single usable pivot
            measures["pivot gap"] = float("nan") if gap is None else gap
        except MEASUREMENT_ERRORS as e:
            logger.warning(f"pivot gap failed: {e}")
        _attempt(measures, "overlap gap", lambda: overlap_residue_gap(point, basis))

    try:
        base_projection(point)
        measures["base projection"] = 0.0
    except DegenerateBaseError:
        measures["base projection"] = 1.0
    _attempt(measures, "z4 closure", lambda: z4_coset(point).closure_residual())
    _attempt(measures, "bundle consistency", lambda: bundle_projection_consistency(point))

    for name in POINT_MEASURES:
        measures.setdefault(name, float("inf"))
    return measures


class VerificationPipeline:
    """Runs one subcommand against a validated configuration."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.coefficients = config.coefficient_vector()
        self.family = preset_name(self.coefficients)
        self.scale = config.tolerances.scale
        self.workers = config.runtime.workers
        self.output = Path(config.output.directory)

    def _report(self, command: str, label: str = "") -> Report:
        echo = self.config.to_dict()
        echo["coefficients"]["resolved"] = self.coefficients.to_strings()
        return Report(command, config=echo, label=label)

    def run(self, command: str, **options) -> Report:
        """Run a subcommand by its CLI name and write report.json."""
        handlers = {
            "atlas-check": self.atlas_check,
            "smoothness": self.smoothness,
            "sample": self.sample,
            "verify": self.verify,
            "fibration": self.fibration,
        }
        if command not in handlers:
            raise ConfigError(f"Unknown command: {command}")
        logger.info(f"Running {command} for c = {self.coefficients.to_strings()}")
        report = handlers[command](**options)
        path = report.write_json(self.output / "report.json")
        logger.info(f"{command}: {report.status} ({path})")
        return report

    def atlas_check(self, overrides: Mapping | None = None) -> Report:
        report = self._report("atlas-check")
        with report.timed("transition identities"):
            transitions = verify_transition_jacobians(overrides)
        for identity in transitions.checks:
            report.add(
                CheckResult(
                    identity.name,
                    identity.passed,
                    detail="" if identity.passed else f"determinant is {identity.determinant}",
                    statistics={
                        "determinant": identity.determinant,
                        "expected": identity.expected,
                    },
                )
            )

        with report.timed("property suites"):
            suites = (check_quadric(), check_equivariance(), check_cocycle(), check_round_trip())
            for result in suites:
                report.add(
                    CheckResult(
                        result.name,
                        result.passed,
                        detail=f"{result.failures}/{result.trials} failures",
                        statistics=result.to_dict(),
                    )
                )

        with report.timed("quartic dictionary"):
            failures = quartic_dictionary_failures(self.coefficients)
            report.add(
                CheckResult(
                    "quartic agrees with its Pluecker form",
                    failures == 0,
                    detail=f"{failures} mismatches",
                )
            )
            per_chart = chart_consistency_failures(self.coefficients)
            report.add(
                CheckResult(
                    "chart expressions agree with the quartic",
                    not any(per_chart.values()),
                    statistics=per_chart,
                )
            )

        if self.coefficients.is_standard:
            report.add(self._golden_chart_expression())
            report.add(self._golden_gradient_system())
        return report

    def _golden_chart_expression(self) -> CheckResult:
        expected = parse_expression(STANDARD_CHART_EXPRESSION, ZETA)
        actual = chart_expression(STANDARD, (0, 1))
        return CheckResult(
            "chart expression f01",
            actual == expected,
            statistics={"expression": actual.to_text()},
        )

    def _golden_gradient_system(self) -> CheckResult:
        expected = [parse_expression(text, ZETA) for text in STANDARD_GRADIENT_SYSTEM]
        actual = gradient_system(STANDARD, (0, 1))
        return CheckResult(
            "gradient system in U01",
            actual == expected,
            statistics={"equations": [p.to_text() for p in actual]},
        )

    def smoothness(self) -> Report:
        report = self._report("smoothness", label="evidence")
        sampling = self.config.sampling
        settings = NewtonSettings(tolerance=RESIDUAL_TOLERANCE * self.scale)
        for chart in CHARTS:
            name = chart_label(chart)
            with report.timed(name):
                result = smoothness_search(
                    self.coefficients,
                    chart,
                    sampling.starts,
                    sampling.seed,
                    workers=self.workers,
                    settings=settings,
                )
            if result.witnesses:
                logger.warning(
                    f"{len(result.witnesses)} singular witnesses, first at "
                    f"{np.round(result.witnesses[0].zeta, 6).tolist()}",
                    extra={"chart": name},
                )
            report.add(
                CheckResult(
                    f"no singular witnesses in {name}",
                    result.smooth,
                    detail=f"{len(result.witnesses)} witnesses from {sampling.starts} starts",
                    statistics=result.to_dict(),
                )
            )

        with report.timed("negative control"):
            toy = critical_point_search(
                parse_expression("zeta1^2", ZETA),
                min(sampling.starts, TOY_STARTS),
                sampling.seed,
                settings=settings,
            )
        report.add(
            CheckResult(
                "search finds the singular locus of zeta1^2",
                bool(toy.witnesses),
                detail=f"{len(toy.witnesses)} witnesses",
            )
        )
        return report

    def _sample_points(self, report: Report) -> list[RealLocusPoint]:
        sampling = self.config.sampling
        with report.timed("sampling"):
            return sample_locus(
                self.coefficients,
                sampling.n,
                sampling.seed,
                workers=self.workers,
                tolerance=LOCUS_TOLERANCE * self.scale,
            )

    def sample(self) -> Report:
        report = self._report("sample")
        points = self._sample_points(report)
        locus_path = write_locus_csv(points, self.output / "locus.csv")
        records_path = write_locus_records(points, self.output / "locus.jsonl")
        logger.info(f"Wrote {len(points)} points to {locus_path} and {records_path}")

        summary = summarize(points)
        tolerance = LOCUS_TOLERANCE * self.scale
        report.add(
            CheckResult(
                "points lie on the normalized locus",
                summary.max_residual < tolerance,
                detail=f"max residual {summary.max_residual:.3e}",
                statistics=statistics(p.max_residual for p in points),
            )
        )
        report.add(
            CheckResult(
                "points lie on the hypersurface",
                summary.max_hypersurface_residual < HYPERSURFACE_TOLERANCE * self.scale,
                detail=f"{len(summary.failures)} points off the hypersurface",
                statistics=statistics(p.hypersurface_residual() for p in points),
            )
        )
        self._family_checks(report, points)
        return report

    def _family_checks(self, report: Report, points: Sequence[RealLocusPoint]) -> None:
        if self.family == "eq7":
            gaps = [abs(p.eta[0] ** 4 - 1) for p in points]
            report.add(
                CheckResult(
                    "locus lies in the chart U01",
                    bool(max(gaps) < LOCUS_TOLERANCE * self.scale),
                    detail=f"max |eta0^4 - 1| = {max(gaps):.3e}",
                    statistics=statistics(gaps),
                )
            )
        elif self.family == "eq8":
            system = alternate_system_eq8()
            failures = 0
            for point in points:
                try:
                    renormalize(point, system, tolerance=LOCUS_TOLERANCE * self.scale)
                except LocusError:
                    failures += 1
            report.add(
                CheckResult(
                    "alternate normalization is equivalent",
                    failures == 0,
                    mandatory=False,
                    detail=f"{failures}/{len(points)} points fail to renormalize",
                )
            )

    def verify(self, points: Sequence[RealLocusPoint] | None = None) -> Report:
        report = self._report("verify")
        if points is None:
            points = self._sample_points(report)
        with report.timed("per-point checks"):
            measures = [measure_point(point) for point in points]
        column = {name: [m[name] for m in measures] for name in POINT_MEASURES}
        scale = self.scale

        def bounded(name: str, label: str, limit: float, mandatory: bool = True, detail=""):
            values = np.asarray(column[name], dtype=float)
            skipped = int(np.count_nonzero(np.isnan(values)))
            values = values[~np.isnan(values)]
            if values.size:
                detail = detail or f"max {float(values.max()):.3e} (limit {limit:.1e})"
            else:
                detail = detail or "not applicable"
            if skipped:
                detail += f"; not applicable at {skipped} points"
            report.add(
                CheckResult(
                    label,
                    bool(np.all(values < limit)),
                    mandatory=mandatory,
                    detail=detail,
                    statistics=statistics(values),
                )
            )

        bounded("locus residual", "points lie on the normalized locus", LOCUS_TOLERANCE * scale)
        bounded(
            "hypersurface residual",
            "points lie on the hypersurface",
            HYPERSURFACE_TOLERANCE * scale,
        )
        ranks = column["submersion rank"]
        report.add(
            CheckResult(
                "normalization map is a submersion",
                all(rank == 2 for rank in ranks),
                detail=f"{sum(rank != 2 for rank in ranks)} points below rank 2",
            )
        )
        bounded(
            "symplectic residual", "tangent spaces are Lagrangian", SYMPLECTIC_TOLERANCE * scale
        )
        controls = column["complexified control"]
        report.add(
            CheckResult(
                "complexified directions are not isotropic",
                all(np.isfinite(v) and v > CONTROL_THRESHOLD for v in controls),
                detail=f"min control {min(controls):.3e}",
                statistics=statistics(controls),
            )
        )
        complexified = column["complexified symplectic"]
        report.add(
            CheckResult(
                "Lagrangian check detects complexified directions",
                all(np.isfinite(v) and v > CONTROL_THRESHOLD for v in complexified),
                detail=f"min residual {min(complexified):.3e}",
                statistics=statistics(complexified),
            )
        )

        angles = [a for a in column["line angle"] if np.isfinite(a)]
        spread = line_angle_spread(angles) if len(angles) == len(points) else float("inf")
        report.add(
            CheckResult(
                "volume form has constant phase",
                spread < PHASE_SPREAD_TOLERANCE * scale,
                detail=f"line angle spread {spread:.3e}",
                statistics={"spread": spread, "deviation": statistics(column["phase deviation"])},
            )
        )
        rotated = [a for a in column["rotated line angle"] if np.isfinite(a)]
        # a quarter turn on half the triples must show up as spread
        mixed = angles + rotated
        rotated_spread = line_angle_spread(mixed) if len(mixed) == 2 * len(points) else 0.0
        report.add(
            CheckResult(
                "phase check detects a rotated direction",
                rotated_spread > CONTROL_THRESHOLD,
                detail=f"mixed line angle spread {rotated_spread:.3e}",
            )
        )
        bounded("pivot gap", "volume form is pivot independent", PIVOT_TOLERANCE * scale)
        bounded("overlap gap", "residue form agrees across charts", OVERLAP_TOLERANCE * scale)

        standard = self.coefficients.is_standard
        detail = "" if standard else NON_STANDARD_DETAIL
        degenerate = int(sum(column["base projection"]))
        report.add(
            CheckResult(
                "base projection is defined",
                degenerate == 0,
                mandatory=standard,
                detail=detail or f"{degenerate} degenerate points",
            )
        )
        bounded(
            "z4 closure",
            "lifts form a Z4 coset",
            CLOSURE_TOLERANCE * scale,
            mandatory=standard,
            detail=detail,
        )
        bounded(
            "bundle consistency",
            "bundle projections agree",
            BUNDLE_TOLERANCE * scale,
            mandatory=standard,
            detail=detail,
        )
        self._family_checks(report, points)
        return report

    def fibration(self) -> Report:
        if not self.coefficients.is_standard:
            raise ConfigError("fibration needs the eq1 coefficients")
        report = self._report("fibration")
        sampling = self.config.sampling
        scale = self.scale
        rows = []
        bases = []
        base_gaps = []
        closures = []
        half_turns = []
        z4_gaps = []
        with report.timed("fibers"):
            for base_id in range(sampling.m_bases):
                rng = np.random.default_rng([sampling.seed, base_id])
                w, w_prime = normalize_base(rng.standard_normal(3), rng.standard_normal(3))
                base = projective_class(np.cross(w, w_prime))
                bases.append(base)
                points = fiber_samples(w, w_prime, sampling.m_fiber)
                for k, point in enumerate(points):
                    rows.append((base_id, 2 * np.pi * k / sampling.m_fiber, point.frame))
                base_gaps.append(
                    max(projective_angle(base_projection(p), base) for p in points)
                )
                z4_gaps.append(max(z4_coset(p).closure_residual() for p in points))
                closures.append(loop_closure_ratio(points))
                half_turns.append(eta_distance(points[0].eta, fiber_point(w, w_prime, np.pi).eta))
        path = write_fibers_csv(rows, self.output / "fibers.csv")
        logger.info(f"Wrote {len(rows)} fiber points to {path}")

        report.add(
            CheckResult(
                "fibers close",
                max(closures) < FIBER_CLOSURE_RATIO,
                detail=f"max closing chord ratio {max(closures):.3f}",
                statistics=statistics(closures),
            )
        )
        report.add(
            CheckResult(
                "fibers are traversed once",
                min(half_turns) > BASE_SEPARATION,
                detail=f"min half-turn distance {min(half_turns):.3e}",
                statistics=statistics(half_turns),
            )
        )
        report.add(
            CheckResult(
                "fiber points share their base",
                max(base_gaps) < BASE_TOLERANCE * scale,
                detail=f"max base angle {max(base_gaps):.3e}",
                statistics=statistics(base_gaps),
            )
        )
        separation = min(
            (
                projective_angle(a, b)
                for i, a in enumerate(bases)
                for b in bases[i + 1 :]
            ),
            default=float("inf"),
        )
        report.add(
            CheckResult(
                "distinct bases separate",
                separation > BASE_SEPARATION,
                detail=f"min base separation {separation:.3e}",
            )
        )
        report.add(
            CheckResult(
                "fiber lifts form Z4 cosets",
                max(z4_gaps) < CLOSURE_TOLERANCE * scale,
                statistics=statistics(z4_gaps),
            )
        )
        report.add(self._known_fiber())
        return report

    def _known_fiber(self) -> CheckResult:
        point = fiber_point(np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]), 0.0)
        gap = float(np.linalg.norm(point.eta - np.array(KNOWN_POINT_ETA)))
        base = base_projection(point)
        return CheckResult(
            "fiber over (0:0:1) contains the known point",
            gap < BASE_TOLERANCE and projective_angle(base, (0.0, 0.0, 1.0)) < BASE_TOLERANCE,
            detail=f"eta gap {gap:.3e}",
        )


def cmd_atlas_check(config: RunConfig | None = None, overrides: Mapping | None = None) -> Report:
    return VerificationPipeline(config or RunConfig()).run("atlas-check", overrides=overrides)


def cmd_smoothness(config: RunConfig) -> Report:
    return VerificationPipeline(config).run("smoothness")


def cmd_sample(config: RunConfig) -> Report:
    return VerificationPipeline(config).run("sample")


def cmd_verify(config: RunConfig, points: Sequence[RealLocusPoint] | None = None) -> Report:
    return VerificationPipeline(config).run("verify", points=points)


def cmd_fibration(
    config: RunConfig, m_bases: int | None = None, m_fiber: int | None = None
) -> Report:
    """Run fibration with optional base and fiber counts; the caller's config is not touched."""
    sampling = config.sampling
    if m_bases is not None:
        if m_bases < 1:
            raise ConfigError("sampling.m_bases must be at least 1")
        sampling = replace(sampling, m_bases=m_bases)
    if m_fiber is not None:
        if m_fiber < 3:
            raise ConfigError("sampling.m_fiber must be at least 3")
        sampling = replace(sampling, m_fiber=m_fiber)
    return VerificationPipeline(replace(config, sampling=sampling)).run("fibration")
