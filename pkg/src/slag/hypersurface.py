"""Quartic hypersurfaces X_c = {sum_i c_i eta_i^4 = 0} of G(2,4).

Covers the coefficient family, the chart-local degree-8 expressions, a multistart
Newton search for singular points, sampling of X by line intersection, and the
residue 3-form with its cross-chart consistency.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any

import numpy as np
from scipy.linalg import null_space

from slag.exactpoly import Polynomial, parse_expression, to_fraction
from slag.grassmann import (
    CHARTS,
    ETA,
    ZETA,
    ChartError,
    ChartPoint,
    Frame,
    chart_coords,
    chart_frame_polynomials,
    pair_index,
    pluecker,
    pluecker_coordinates,
    random_rational_frame,
    transition,
    transition_jacobian,
    validate_chart,
)
from slag.logger import chart_label, get_logger
from slag.parallel import chunk_indices, run_parallel

logger = get_logger(__name__)

PRESETS: dict[str, tuple[str, ...]] = {
    "eq1": ("1", "1", "1", "-1", "-1", "-1"),
    "eq7": ("1", "-1", "-1", "-1", "-1", "-2"),
    "eq8": ("1", "1", "-1", "-2", "-2", "-2"),
}

RESIDUAL_TOLERANCE = 1e-10
SINGULAR_TOLERANCE = 1e-8
TANGENT_TOLERANCE = 1e-8
SEARCH_RADIUS = 2.0
MAX_LINE_DRAWS = 10


class HypersurfaceError(Exception):
    """Hypersurface error."""

    pass


class CoefficientError(HypersurfaceError, ValueError):
    """Invalid coefficient vector."""

    pass


class SingularPointError(HypersurfaceError):
    """All partial derivatives vanish at the point."""

    pass


class NotTangentError(HypersurfaceError):
    """Vectors do not annihilate df."""

    pass


@dataclass(frozen=True)
class CoefficientVector:
    """Six nonzero rational coefficients with mixed signs, ordered like eta."""

    values: tuple[Fraction, ...]

    def __post_init__(self):
        try:
            values = tuple(to_fraction(v) for v in self.values)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise CoefficientError(f"malformed rational coefficient: {e}") from e
        if len(values) != 6:
            raise CoefficientError(f"expected 6 coefficients, got {len(values)}")
        if any(v == 0 for v in values):
            raise CoefficientError("coefficients must all be nonzero")
        if not (any(v > 0 for v in values) and any(v < 0 for v in values)):
            raise CoefficientError("coefficients need at least one sign opposite to the others")
        object.__setattr__(self, "values", values)

    @classmethod
    def parse(cls, texts: Sequence[Any]) -> "CoefficientVector":
        return cls(tuple(texts))

    @classmethod
    def preset(cls, name: str) -> "CoefficientVector":
        if name not in PRESETS:
            raise CoefficientError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        return cls.parse(PRESETS[name])

    def as_array(self, exact: bool = False) -> np.ndarray:
        if exact:
            return np.array(self.values, dtype=object)
        return np.array([float(v) for v in self.values])

    @property
    def max_abs(self) -> float:
        return float(max(abs(v) for v in self.values))

    @property
    def is_standard(self) -> bool:
        return self == STANDARD

    def to_strings(self) -> list[str]:
        return [str(v) for v in self.values]


STANDARD = CoefficientVector.preset("eq1")


def eval_F(c: CoefficientVector, frame: Frame) -> Any:
    """sum_i c_i eta_i^4 at the frame; exact for rational frames."""
    eta = pluecker(frame).eta
    return sum(coeff * e**4 for coeff, e in zip(c.as_array(exact=frame.exact), eta))


def quartic_polynomial(c: CoefficientVector) -> Polynomial:
    """The quartic in P^5 whose restriction to the Klein quadric is F_c."""
    terms = " + ".join(f"({value})*eta{i}^4" for i, value in enumerate(c.values))
    return parse_expression(terms, ETA)


@lru_cache(maxsize=None)
def chart_expression(c: CoefficientVector, chart: tuple[int, int]) -> Polynomial:
    """Degree-8 polynomial f_c,ij in zeta_1..zeta_4 (F_c divided by m_ij^4)."""
    u, u_prime = chart_frame_polynomials(validate_chart(chart))
    total = Polynomial.zero(ZETA)
    for coeff, minor in zip(c.values, pluecker_coordinates(u, u_prime)):
        total = total + minor**4 * coeff
    return total


def gradient_system(c: CoefficientVector, chart: tuple[int, int]) -> list[Polynomial]:
    """Partials of chart_expression with the common factor 4 removed."""
    expression = chart_expression(c, validate_chart(chart))
    return [expression.diff(name) * Fraction(1, 4) for name in ZETA]


class CriticalSystem:
    """Numeric evaluators for f, its scaled gradient g = grad f / 4 and the Jacobian of g."""

    def __init__(self, polynomial: Polynomial, gradient_scale: Fraction = Fraction(1, 4)):
        self.polynomial = polynomial
        self.gradient_scale = gradient_scale
        self.gradient = [polynomial.diff(v) * gradient_scale for v in polynomial.variables]
        self.hessian = [[g.diff(v) for v in polynomial.variables] for g in self.gradient]

    def value(self, z: np.ndarray) -> np.ndarray:
        return self.polynomial.numeric(z)

    def scaled_gradient(self, z: np.ndarray) -> np.ndarray:
        return np.stack([g.numeric(z) for g in self.gradient], axis=-1)

    def full_gradient(self, z: np.ndarray) -> np.ndarray:
        return self.scaled_gradient(z) / float(self.gradient_scale)

    def scaled_hessian(self, z: np.ndarray) -> np.ndarray:
        return np.stack(
            [np.stack([h.numeric(z) for h in row], axis=-1) for row in self.hessian], axis=-2
        )

    def joint_residual(self, z: np.ndarray) -> np.ndarray:
        return np.concatenate([self.value(z)[..., None], self.scaled_gradient(z)], axis=-1)

    def joint_jacobian(self, z: np.ndarray) -> np.ndarray:
        return np.concatenate(
            [self.full_gradient(z)[..., None, :], self.scaled_hessian(z)], axis=-2
        )


@lru_cache(maxsize=None)
def critical_system(polynomial: Polynomial) -> CriticalSystem:
    return CriticalSystem(polynomial)


@dataclass(frozen=True)
class NewtonSettings:
    tolerance: float = RESIDUAL_TOLERANCE
    max_iterations: int = 100
    max_halvings: int = 30
    radius: float = SEARCH_RADIUS


def newton_batch(residual, jacobian, starts: np.ndarray, settings: NewtonSettings):
    """Damped Gauss-Newton on a batch of complex starts.

    Each accepted step strictly decreases the residual norm (step halving); a start
    is retired when no halving helps or its residual reaches roundoff.
    """
    z = np.array(starts, dtype=complex)
    r = residual(z)
    norms = np.linalg.norm(r, axis=-1)
    live = np.isfinite(norms)
    for _ in range(settings.max_iterations):
        index = np.flatnonzero(live & (norms > settings.tolerance * 1e-4))
        if index.size == 0:
            break
        z_live, r_live, n_live = z[index], r[index], norms[index]
        step = -np.einsum("kij,kj->ki", np.linalg.pinv(jacobian(z_live)), r_live)
        t = np.ones(index.size)
        accepted = np.zeros(index.size, dtype=bool)
        for _ in range(settings.max_halvings):
            pending = np.flatnonzero(~accepted)
            if pending.size == 0:
                break
            candidate = z_live[pending] + t[pending, None] * step[pending]
            candidate_r = residual(candidate)
            candidate_n = np.linalg.norm(candidate_r, axis=-1)
            better = candidate_n < n_live[pending]
            good = pending[better]
            z_live[good] = candidate[better]
            r_live[good] = candidate_r[better]
            n_live[good] = candidate_n[better]
            accepted[good] = True
            t[pending[~better]] *= 0.5
        z[index], r[index], norms[index] = z_live, r_live, n_live
        live[index[~accepted]] = False
    return z, norms


def polydisc_start(seed: int, index: int, radius: float = SEARCH_RADIUS) -> np.ndarray:
    """Uniform point of the polydisc |zeta_i| <= radius from the (seed, index) substream."""
    rng = np.random.default_rng([seed, index])
    modulus = radius * np.sqrt(rng.random(4))
    angle = 2 * np.pi * rng.random(4)
    return modulus * np.exp(1j * angle)


@dataclass
class Witness:
    """A numerical solution of f = 0, grad f = 0."""

    zeta: np.ndarray
    f_residual: float
    gradient_residual: float

    def to_dict(self) -> dict:
        return {
            "zeta": [[float(z.real), float(z.imag)] for z in self.zeta],
            "f_residual": self.f_residual,
            "gradient_residual": self.gradient_residual,
        }


@dataclass
class SmoothnessReport:
    """Evidence, not proof: multistart Newton cannot show emptiness."""

    chart: tuple[int, int] | None
    n_starts: int
    n_converged: int = 0
    witnesses: list[Witness] = field(default_factory=list)
    residual_min: float = 0.0
    residual_median: float = 0.0
    residual_max: float = 0.0
    critical_points: int = 0
    min_abs_f_at_critical: float | None = None
    critical_norm_range: tuple[float, float] | None = None
    label: str = "evidence"

    @property
    def smooth(self) -> bool:
        return not self.witnesses

    def to_dict(self) -> dict:
        return {
            "chart": list(self.chart) if self.chart else None,
            "n_starts": self.n_starts,
            "n_converged": self.n_converged,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "residual_min": self.residual_min,
            "residual_median": self.residual_median,
            "residual_max": self.residual_max,
            "critical_points": self.critical_points,
            "min_abs_f_at_critical": self.min_abs_f_at_critical,
            "critical_norm_range": (
                list(self.critical_norm_range) if self.critical_norm_range else None
            ),
            "label": self.label,
        }


def _search_chunk(system: CriticalSystem, indices: np.ndarray, seed: int, settings):
    starts = np.array([polydisc_start(seed, int(i), settings.radius) for i in indices])
    z, joint_norms = newton_batch(system.joint_residual, system.joint_jacobian, starts, settings)
    f_values = np.abs(system.value(z))
    gradient_norms = np.linalg.norm(system.full_gradient(z), axis=-1)

    # gradient-only pass: critical points of f, wherever they lie
    zc, critical_norms = newton_batch(
        system.scaled_gradient, system.scaled_hessian, starts, settings
    )
    critical = critical_norms < settings.tolerance
    return (
        z,
        joint_norms,
        f_values,
        gradient_norms,
        np.abs(system.value(zc[critical])),
        np.linalg.norm(zc[critical], axis=-1),
    )


def critical_point_search(
    polynomial: Polynomial,
    n_starts: int,
    seed: int,
    chart: tuple[int, int] | None = None,
    workers: int = 1,
    settings: NewtonSettings | None = None,
) -> SmoothnessReport:
    """Multistart search for common zeros of f and grad f in the polydisc."""
    if n_starts < 1:
        raise HypersurfaceError("n_starts must be at least 1")
    settings = settings or NewtonSettings()
    system = critical_system(polynomial)
    tasks = [(system, indices, seed, settings) for indices in chunk_indices(n_starts)]
    chunks = run_parallel(_search_chunk, tasks, workers)

    z = np.concatenate([chunk[0] for chunk in chunks])
    joint_norms = np.concatenate([chunk[1] for chunk in chunks])
    f_values = np.concatenate([chunk[2] for chunk in chunks])
    gradient_norms = np.concatenate([chunk[3] for chunk in chunks])
    critical_f = np.concatenate([chunk[4] for chunk in chunks])
    critical_norms = np.concatenate([chunk[5] for chunk in chunks])

    tol = settings.tolerance
    is_witness = (joint_norms < tol) & (f_values < tol) & (gradient_norms < tol)
    finite = joint_norms[np.isfinite(joint_norms)]
    report = SmoothnessReport(
        chart=chart,
        n_starts=n_starts,
        n_converged=int(np.count_nonzero(joint_norms < tol)),
        witnesses=[
            Witness(z[i], float(f_values[i]), float(gradient_norms[i]))
            for i in np.flatnonzero(is_witness)
        ],
        residual_min=float(finite.min()) if finite.size else float("nan"),
        residual_median=float(np.median(finite)) if finite.size else float("nan"),
        residual_max=float(finite.max()) if finite.size else float("nan"),
        critical_points=int(critical_f.size),
        min_abs_f_at_critical=float(critical_f.min()) if critical_f.size else None,
        critical_norm_range=(
            (float(critical_norms.min()), float(critical_norms.max()))
            if critical_norms.size
            else None
        ),
    )
    logger.info(
        f"Critical search with {n_starts} starts: {len(report.witnesses)} witnesses, "
        f"min joint residual {report.residual_min:.3e}",
        extra={"chart": chart_label(chart) if chart else "-"},
    )
    return report


def smoothness_search(
    c: CoefficientVector,
    chart: tuple[int, int],
    n_starts: int,
    seed: int,
    workers: int = 1,
    settings: NewtonSettings | None = None,
) -> SmoothnessReport:
    chart = validate_chart(chart)
    return critical_point_search(
        chart_expression(c, chart), n_starts, seed, chart=chart, workers=workers, settings=settings
    )


def residual_bound(c: CoefficientVector, zeta: np.ndarray, tolerance: float) -> float:
    return tolerance * (1.0 + float(np.linalg.norm(zeta)) ** 4 * c.max_abs)


@dataclass(frozen=True, eq=False)
class HypersurfacePoint:
    """A point of X in chart coordinates, with its cached residual |f(zeta)|."""

    chart: tuple[int, int]
    zeta: np.ndarray
    residual: float

    @classmethod
    def from_zeta(
        cls,
        c: CoefficientVector,
        chart: Sequence[int],
        zeta: Sequence[complex],
        tolerance: float = RESIDUAL_TOLERANCE,
    ) -> "HypersurfacePoint":
        chart = validate_chart(chart)
        zeta = np.asarray(zeta, dtype=complex)
        residual = float(abs(chart_expression(c, chart).numeric(zeta)))
        if residual > residual_bound(c, zeta, tolerance):
            raise HypersurfaceError(
                f"point is not on the hypersurface (residual {residual:.3e})"
            )
        return cls(chart, zeta, residual)


def _line_point(c: CoefficientVector, chart: tuple[int, int], rng: np.random.Generator):
    system = critical_system(chart_expression(c, chart))
    anchor = 0.5 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    direction = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    direction /= np.linalg.norm(direction)

    # f restricted to the line has degree <= 8; read its coefficients off 9th roots of unity
    nodes = np.exp(2j * np.pi * np.arange(9) / 9)
    values = system.value(anchor + nodes[:, None] * direction)
    coefficients = np.fft.fft(values) / 9
    roots = np.roots(coefficients[::-1])
    if roots.size == 0:
        return None
    t = roots[np.argmin(np.abs(roots))]
    for _ in range(8):
        z = anchor + t * direction
        slope = system.full_gradient(z) @ direction
        if slope == 0:
            return None
        t = t - system.value(z) / slope
    return anchor + t * direction


def sample_hypersurface(
    c: CoefficientVector, chart: Sequence[int], n: int, seed: int
) -> list[HypersurfacePoint]:
    """Points of X in one chart from random complex lines; deterministic per (seed, index)."""
    chart = validate_chart(chart)
    points = []
    for index in range(n):
        rng = np.random.default_rng([seed, index])
        for _ in range(MAX_LINE_DRAWS):
            zeta = _line_point(c, chart, rng)
            if zeta is None:
                continue
            try:
                points.append(HypersurfacePoint.from_zeta(c, chart, zeta))
                break
            except HypersurfaceError:
                continue
        else:
            raise HypersurfaceError(f"no intersection found for sample {index}")
    return points


def tangent_space(c: CoefficientVector, point: HypersurfacePoint) -> np.ndarray:
    """Orthonormal (3, 4) basis of the holomorphic tangent space {t : df(t) = 0}."""
    gradient = critical_system(chart_expression(c, point.chart)).full_gradient(point.zeta)
    return null_space(gradient[None, :]).T


def residue_form(
    c: CoefficientVector,
    point: HypersurfacePoint,
    tangent: Sequence[Sequence[complex]],
    pivot: int | None = None,
) -> complex:
    """gamma(t1, t2, t3) for the residue 3-form gamma with gamma ^ df = dzeta_1..dzeta_4.

    Pivoting on zeta_q (0-based q) gives gamma = (-1)^(q+1) dzeta_(others) / (df/dzeta_q);
    the default pivot is the largest |df/dzeta_q|.
    """
    tangent = np.asarray(tangent, dtype=complex)
    if tangent.shape != (3, 4):
        raise HypersurfaceError(f"expected 3 tangent vectors in C^4, got {tangent.shape}")
    gradient = critical_system(chart_expression(c, point.chart)).full_gradient(point.zeta)
    scale = float(np.max(np.abs(gradient)))
    if scale < SINGULAR_TOLERANCE:
        raise SingularPointError(f"all partials below {SINGULAR_TOLERANCE} at {point.zeta}")
    contraction = np.abs(tangent @ gradient)
    bound = TANGENT_TOLERANCE * np.linalg.norm(gradient) * np.linalg.norm(tangent, axis=1)
    if np.any(contraction > bound):
        raise NotTangentError(f"tangent vectors do not annihilate df: {contraction.max():.3e}")
    q = int(np.argmax(np.abs(gradient))) if pivot is None else int(pivot)
    if abs(gradient[q]) < SINGULAR_TOLERANCE:
        raise SingularPointError(f"pivot partial df/dzeta_{q + 1} vanishes")
    others = [i for i in range(4) if i != q]
    sign = -1 if q % 2 == 0 else 1
    return complex(sign * np.linalg.det(tangent[:, others]) / gradient[q])


def residue_chart_consistency(
    c: CoefficientVector,
    point: HypersurfacePoint,
    target: Sequence[int],
    tangent: Sequence[Sequence[complex]],
) -> float:
    """Relative gap between gamma in both charts, tangents pushed through the transition."""
    target = validate_chart(target)
    tangent = np.asarray(tangent, dtype=complex)
    image = transition(ChartPoint(point.chart, point.zeta), target)
    differential = transition_jacobian(point.chart, target)(point.zeta)
    moved = HypersurfacePoint.from_zeta(c, target, image.zeta)
    source_value = residue_form(c, point, tangent)
    target_value = residue_form(c, moved, tangent @ differential.T)
    return float(abs(source_value - target_value) / abs(source_value))


def chart_consistency_failures(
    c: CoefficientVector, trials: int = 100, seed: int = 4
) -> dict[str, int]:
    """Exact f_ij(chart_coords(F)) m_ij^4 == eval_F(c, F) per chart on random rational frames."""
    rng = np.random.default_rng(seed)
    failures = {}
    for chart in CHARTS:
        expression = chart_expression(c, chart)
        _, base_index = pair_index(*chart)
        count = 0
        done = 0
        while done < trials:
            frame = random_rational_frame(rng)
            try:
                zeta = chart_coords(frame, chart).zeta
            except ChartError:
                continue
            done += 1
            minor = pluecker(frame).eta[base_index]
            if expression.evaluate(list(zeta)) * minor**4 != eval_F(c, frame):
                count += 1
        failures[f"U{chart[0]}{chart[1]}"] = count
    return failures


def quartic_dictionary_failures(c: CoefficientVector, trials: int = 100, seed: int = 5) -> int:
    """Count frames where eval_F differs from the P^5 quartic at the Pluecker point."""
    rng = np.random.default_rng(seed)
    quartic = quartic_polynomial(c)
    failures = 0
    for _ in range(trials):
        frame = random_rational_frame(rng)
        if quartic.evaluate(list(pluecker(frame).eta)) != eval_F(c, frame):
            failures += 1
    return failures


def pivot_order(
    c: CoefficientVector, point: HypersurfacePoint, threshold: float = 0.0
) -> list[int]:
    """Variable indices by decreasing |df/dzeta_q|, keeping partials of size at least threshold."""
    gradient = critical_system(chart_expression(c, point.chart)).full_gradient(point.zeta)
    order = np.argsort(-np.abs(gradient), kind="stable")
    return [int(q) for q in order if abs(gradient[q]) >= threshold]
