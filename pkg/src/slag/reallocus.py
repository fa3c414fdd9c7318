"""The real locus L of a quartic hypersurface and its normalized slice.

A real frame x = (u, u') = ((alpha, u0), (alpha', u0')) lies on the normalized locus
when P = sum_{c_i > 0} c_i eta_i^4 and N = sum_{c_i < 0} |c_i| eta_i^4 both equal 1.
For the standard coefficients this is psi(x) = (|u0 x u0'|_4^4, |alpha' u0 - alpha u0'|_4^4)
= (1, 1). Frames are identified under the GL_2 action; the checks here work on
representatives and on tangent vectors transverse to the normalization-preserving
part of that action.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.linalg import null_space

from slag.grassmann import (
    PAIRS,
    Frame,
    GrassmannError,
    chart_layout,
    chart_point_from_eta,
    frame_action,
    pair_index,
    pluecker,
)
from slag.hypersurface import (
    SINGULAR_TOLERANCE,
    STANDARD,
    CoefficientVector,
    HypersurfacePoint,
    eval_F,
    pivot_order,
    residue_chart_consistency,
    residue_form,
)
from slag.logger import get_logger
from slag.parallel import chunk_indices, run_parallel

logger = get_logger(__name__)

LOCUS_TOLERANCE = 1e-10
RANK_THRESHOLD = 1e-8
SYMPLECTIC_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-12
NEWTON_TARGET = 1e-12
MAX_NEWTON_ITERATIONS = 100
MAX_REDRAWS = 10
SIGN_THRESHOLD = 1e-9


class LocusError(Exception):
    """Real locus error."""

    pass


class SamplingError(LocusError):
    """Constrained Newton did not converge within the retry budget."""

    pass


class RankDeficiencyError(LocusError):
    """The constraint map is not a submersion at the point."""

    pass


class DegenerateBaseError(LocusError):
    """Base plane degenerate or not normalized."""

    pass


def quartic_norm(v: Sequence[Any]) -> Any:
    """v_1^4 + v_2^4 + v_3^4; exact for rational input."""
    return sum(x**4 for x in v)


def cross(a: Sequence[Any], b: Sequence[Any]) -> list[Any]:
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def psi(
    alpha: Any, u0: Sequence[Any], alpha_prime: Any, u0_prime: Sequence[Any]
) -> tuple[Any, Any]:
    """(|u0 x u0'|^4_4, |alpha' u0 - alpha u0'|^4_4)."""
    difference = [alpha_prime * a - alpha * b for a, b in zip(u0, u0_prime)]
    return quartic_norm(cross(u0, u0_prime)), quartic_norm(difference)


def psi_of_frame(frame: Frame) -> tuple[Any, Any]:
    u, u_prime = frame.u, frame.u_prime
    return psi(u[0], u[1:], u_prime[0], u_prime[1:])


def pluecker_jacobian(frame: Frame) -> np.ndarray:
    """d eta / d(u, u') as a (6, 8) matrix."""
    u, u_prime = frame.u, frame.u_prime
    jacobian = np.zeros((6, 8), dtype=u.dtype if u.dtype != object else float)
    for row, (a, b) in enumerate(PAIRS):
        jacobian[row, a] += u_prime[b]
        jacobian[row, b] -= u_prime[a]
        jacobian[row, 4 + b] += u[a]
        jacobian[row, 4 + a] -= u[b]
    return jacobian


@dataclass(frozen=True)
class LocusSystem:
    """Two nonnegative weight vectors; the locus is {first . eta^4 = 1, second . eta^4 = 1}."""

    first: tuple[float, ...]
    second: tuple[float, ...]
    name: str = "standard"

    def values(self, eta: Sequence[Any]) -> tuple[float, float]:
        eta = np.asarray(eta, dtype=float)
        powers = eta**4
        return float(np.dot(self.first, powers)), float(np.dot(self.second, powers))

    def jacobian(self, frame: Frame) -> np.ndarray:
        """(2, 8) gradient of (first, second) in the frame coordinates."""
        eta = pluecker(frame).eta.astype(float)
        cubes = 4 * eta**3
        jacobian_eta = pluecker_jacobian(frame)
        return np.array(
            [
                (np.asarray(self.first) * cubes) @ jacobian_eta,
                (np.asarray(self.second) * cubes) @ jacobian_eta,
            ]
        )


def locus_system(c: CoefficientVector) -> LocusSystem:
    """Positive part P and negative part N of F_c."""
    values = c.as_array()
    return LocusSystem(
        tuple(float(v) for v in np.maximum(values, 0)),
        tuple(float(v) for v in np.maximum(-values, 0)),
        name="positive/negative",
    )


def alternate_system_eq8() -> LocusSystem:
    """Second normalization of the eq8 family; first - second is still F_c."""
    return LocusSystem((1.0, 1.0, 1.0, 0.0, 0.0, 0.0), (0.0, 0.0, 2.0, 2.0, 2.0, 2.0), "eq8-alt")


def locus_residuals(c: CoefficientVector, frame: Frame) -> tuple[Any, Any]:
    """(P, N); exact for rational frames."""
    eta = pluecker(frame).eta
    values = c.as_array(exact=frame.exact)
    positive = sum(v * e**4 for v, e in zip(values, eta) if v > 0)
    negative = sum(-v * e**4 for v, e in zip(values, eta) if v < 0)
    return positive, negative


@dataclass(frozen=True, eq=False)
class RealLocusPoint:
    """A validated real frame on the normalized locus."""

    coefficients: CoefficientVector
    frame: Frame
    eta: np.ndarray
    first_value: float
    second_value: float
    system: LocusSystem

    @classmethod
    def from_frame(
        cls,
        c: CoefficientVector,
        frame: Frame,
        system: LocusSystem | None = None,
        tolerance: float = LOCUS_TOLERANCE,
    ) -> "RealLocusPoint":
        frame = frame.to_float()
        if np.iscomplexobj(frame.u):
            raise LocusError("real locus points need a real frame")
        system = system or locus_system(c)
        eta = pluecker(frame).eta
        first, second = system.values(eta)
        if abs(first - 1) > tolerance or abs(second - 1) > tolerance:
            raise LocusError(
                f"frame is off the normalized locus: residuals {first - 1:.3e}, {second - 1:.3e}"
            )
        return cls(c, frame, eta, first, second, system)

    @property
    def e1_residual(self) -> float:
        return abs(self.first_value - 1)

    @property
    def e2_residual(self) -> float:
        return abs(self.second_value - 1)

    @property
    def max_residual(self) -> float:
        return max(self.e1_residual, self.e2_residual)

    @property
    def alpha(self) -> float:
        return float(self.frame.u[0])

    @property
    def u0(self) -> np.ndarray:
        return self.frame.u[1:]

    @property
    def alpha_prime(self) -> float:
        return float(self.frame.u_prime[0])

    @property
    def u0_prime(self) -> np.ndarray:
        return self.frame.u_prime[1:]

    def hypersurface_residual(self) -> float:
        return float(abs(eval_F(self.coefficients, self.frame)))

    def to_record(self, index: int) -> dict:
        return {
            "index": index,
            "frame": {
                "u": [float(x) for x in self.frame.u],
                "u_prime": [float(x) for x in self.frame.u_prime],
            },
            "eta": [float(e) for e in self.eta],
            "residuals": [self.e1_residual, self.e2_residual],
        }


def _values(system: LocusSystem, x: np.ndarray) -> np.ndarray:
    frame = Frame(x[:4], x[4:])
    return np.array(system.values(pluecker(frame).eta)) - 1.0


def project_to_locus(system: LocusSystem, x: np.ndarray) -> np.ndarray | None:
    """Least-norm damped Newton onto {first = 1, second = 1}; None on failure."""
    try:
        frame = Frame(x[:4], x[4:])
        first, _ = system.values(pluecker(frame).eta)
        if first <= 0:
            return None
        frame = frame_action(frame, first**-0.25, 0.0, 0.0, 1.0)
        x = frame.coordinates.astype(float)
        residual = _values(system, x)
        for _ in range(MAX_NEWTON_ITERATIONS):
            norm = np.linalg.norm(residual)
            if np.max(np.abs(residual)) < NEWTON_TARGET:
                return x
            step = -np.linalg.pinv(system.jacobian(Frame(x[:4], x[4:]))) @ residual
            t = 1.0
            for _ in range(40):
                trial = x + t * step
                trial_residual = _values(system, trial)
                if np.linalg.norm(trial_residual) < norm:
                    break
                t *= 0.5
            else:
                return None
            x, residual = trial, trial_residual
    except (GrassmannError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.debug(f"Projection abandoned: {e}")
        return None
    return None


def _sample_chunk(c, system, seed, indices, tolerance) -> list[RealLocusPoint]:
    points = []
    for index in indices:
        rng = np.random.default_rng([seed, int(index)])
        for _ in range(MAX_REDRAWS):
            start, _ = np.linalg.qr(rng.standard_normal((4, 2)))
            x = project_to_locus(system, np.concatenate([start[:, 0], start[:, 1]]))
            if x is None:
                continue
            try:
                points.append(
                    RealLocusPoint.from_frame(c, Frame(x[:4], x[4:]), system, tolerance)
                )
                break
            except LocusError:
                continue
        else:
            raise SamplingError(
                f"sampler did not converge for point {index} after {MAX_REDRAWS} redraws"
            )
    return points


def sample_locus(
    c: CoefficientVector,
    n: int,
    seed: int,
    system: LocusSystem | None = None,
    workers: int = 1,
    tolerance: float = LOCUS_TOLERANCE,
) -> list[RealLocusPoint]:
    """n validated locus points; point i depends only on (c, system, seed, i)."""
    if n < 1:
        raise LocusError("n must be at least 1")
    system = system or locus_system(c)
    tasks = [(c, system, seed, indices, tolerance) for indices in chunk_indices(n)]
    chunks = run_parallel(_sample_chunk, tasks, workers)
    points = [point for chunk in chunks for point in chunk]
    logger.info(
        f"Sampled {len(points)} locus points (system={system.name}, seed={seed}), "
        f"max residual {max(p.max_residual for p in points):.2e}"
    )
    return points


def renormalize(
    point: RealLocusPoint, system: LocusSystem, tolerance: float = LOCUS_TOLERANCE
) -> RealLocusPoint:
    """Rescale u' so the first constraint of ``system`` is 1, then validate the second."""
    first, _ = system.values(point.eta)
    if first <= 0:
        raise LocusError(f"first constraint of {system.name} vanishes at the point")
    frame = frame_action(point.frame, 1.0, 0.0, 0.0, first**-0.25)
    return RealLocusPoint.from_frame(point.coefficients, frame, system, tolerance)


def _first_significant(eta: np.ndarray) -> int:
    threshold = SIGN_THRESHOLD * float(np.max(np.abs(eta)))
    return int(np.flatnonzero(np.abs(eta) > threshold)[0])


def canonicalize(point: RealLocusPoint) -> RealLocusPoint:
    """Computable section of the quotient by the GL_2 action.

    The plane gets an orthonormal basis (u, u') with u the normalized projection of the
    coordinate axis closest to the plane; the sign of u' makes the first significant
    Pluecker coordinate positive, and u' is rescaled back onto the normalized locus.
    """
    basis, _ = np.linalg.qr(np.column_stack([point.frame.u, point.frame.u_prime]))
    closeness = basis[:, 0] ** 2 + basis[:, 1] ** 2
    k = int(np.argmax(closeness))
    a, b = basis[k, 0], basis[k, 1]
    length = np.hypot(a, b)
    a, b = a / length, b / length
    u = a * basis[:, 0] + b * basis[:, 1]
    u_prime = -b * basis[:, 0] + a * basis[:, 1]
    eta = pluecker(Frame(u, u_prime)).eta
    if eta[_first_significant(eta)] < 0:
        u_prime = -u_prime
    first, _ = point.system.values(eta)
    frame = Frame(u, u_prime * first**-0.25)
    return RealLocusPoint.from_frame(point.coefficients, frame, point.system)


@dataclass
class SubmersionReport:
    frame: Frame
    jacobian: np.ndarray
    singular_values: np.ndarray
    rank: int

    @property
    def regular(self) -> bool:
        return self.rank == 2

    def to_dict(self) -> dict:
        return {"singular_values": [float(s) for s in self.singular_values], "rank": self.rank}


def psi_jacobian(frame: Frame, c: CoefficientVector = STANDARD) -> np.ndarray:
    """Analytic (2, 8) Jacobian of (N, P), which is psi for the standard coefficients."""
    system = locus_system(c)
    first, second = system.jacobian(frame.to_float())
    return np.array([second, first])


def submersion_check(point: RealLocusPoint | Frame) -> SubmersionReport:
    if isinstance(point, RealLocusPoint):
        frame, c = point.frame, point.coefficients
    else:
        frame, c = point.to_float(), STANDARD
    jacobian = psi_jacobian(frame, c)
    singular_values = np.linalg.svd(jacobian, compute_uv=False)
    if singular_values[0] == 0:
        rank = 0
    elif singular_values[1] > RANK_THRESHOLD * singular_values[0]:
        rank = 2
    else:
        rank = 1
    return SubmersionReport(frame, jacobian, singular_values, rank)


def orbit_directions(frame: Frame) -> np.ndarray:
    """(8, 3) generators of the GL_2 directions that keep both constraints fixed."""
    u, u_prime = frame.u.astype(float), frame.u_prime.astype(float)
    zero = np.zeros(4)
    return np.column_stack(
        [np.concatenate([u, -u_prime]), np.concatenate([u_prime, zero]), np.concatenate([zero, u])]
    )


def tangent_basis(point: RealLocusPoint) -> np.ndarray:
    """Orthonormal (3, 8) basis of ker d(first, second) orthogonal to the orbit directions."""
    report = submersion_check(point)
    if not report.regular:
        raise RankDeficiencyError(f"constraint rank {report.rank} at the point")
    kernel = null_space(point.system.jacobian(point.frame))
    complement = null_space(orbit_directions(point.frame).T @ kernel)
    basis = (kernel @ complement).T
    if basis.shape[0] != 3:
        raise RankDeficiencyError(f"tangent space has dimension {basis.shape[0]}, expected 3")
    return basis


def fubini_study_hermitian(eta: np.ndarray, v: np.ndarray, w: np.ndarray) -> complex:
    """h(v, w) = (<v,w> |eta|^2 - <v,eta> <eta,w>) / |eta|^4 on homogeneous vectors."""
    eta = np.asarray(eta, dtype=complex)
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    norm2 = float(np.vdot(eta, eta).real)
    numerator = np.vdot(w, v) * norm2 - np.vdot(eta, v) * np.vdot(w, eta)
    return complex(numerator / norm2**2)


def fubini_study_form(eta: np.ndarray, v: np.ndarray, w: np.ndarray) -> float:
    return fubini_study_hermitian(eta, v, w).imag


@dataclass
class SymplecticCheck:
    point: RealLocusPoint
    basis: np.ndarray
    max_residual: float
    phase_deviation: float | None = None

    @property
    def lagrangian(self) -> bool:
        scale = float(np.max(np.linalg.norm(self.basis, axis=1))) ** 2
        return self.max_residual < SYMPLECTIC_TOLERANCE * scale

    def to_dict(self) -> dict:
        return {"max_residual": self.max_residual, "phase_deviation": self.phase_deviation}


def _check_basis(point: RealLocusPoint, basis: np.ndarray) -> np.ndarray:
    basis = np.asarray(basis)
    basis = basis.astype(complex if np.iscomplexobj(basis) else float)
    if basis.shape != (3, 8) or np.linalg.matrix_rank(basis) < 3:
        raise LocusError("degenerate tangent basis")
    jacobian = point.system.jacobian(point.frame)
    leak = np.abs(jacobian @ basis.T).max()
    if leak > 1e-8 * max(1.0, float(np.abs(jacobian).max())):
        raise LocusError(f"tangent basis leaves the locus: {leak:.3e}")
    return basis


def symplectic_residual(point: RealLocusPoint, basis: np.ndarray) -> SymplecticCheck:
    """max |omega(d eta(t_i), d eta(t_j))| for the Fubini-Study form at eta."""
    basis = _check_basis(point, basis)
    images = basis @ pluecker_jacobian(point.frame).T
    residual = max(
        abs(fubini_study_form(point.eta, images[i], images[j]))
        for i in range(3)
        for j in range(i + 1, 3)
    )
    return SymplecticCheck(point, basis, float(residual))


def complexified_control(point: RealLocusPoint, basis: np.ndarray) -> float:
    """|omega(i w, w)| for the FS-normalized image w of the first tangent vector; equals 1."""
    w = pluecker_jacobian(point.frame) @ np.asarray(basis[0], dtype=float)
    w = w / np.sqrt(fubini_study_hermitian(point.eta, w, w).real)
    return abs(fubini_study_form(point.eta, 1j * w, w))


def complexified_basis(basis: np.ndarray) -> np.ndarray:
    """Rows (t1, t2 + i t1, t3): a complex triple that is never isotropic."""
    basis = np.array(basis, dtype=complex)
    basis[1] = basis[1] + 1j * basis[0]
    return basis


def rotated_basis(basis: np.ndarray) -> np.ndarray:
    """Rows (i t1, t2, t3): turns the residue form value by a quarter turn."""
    basis = np.array(basis, dtype=complex)
    basis[0] = 1j * basis[0]
    return basis


def chart_jacobian(frame: Frame, chart: tuple[int, int]) -> np.ndarray:
    """d zeta / d(u, u') in chart (i, j) as a (4, 8) matrix."""
    eta = pluecker(frame).eta.astype(float)
    jacobian_eta = pluecker_jacobian(frame)
    _, base = pair_index(*chart)
    rows = []
    for sign, index in chart_layout(chart):
        numerator = jacobian_eta[index] * eta[base] - eta[index] * jacobian_eta[base]
        rows.append(sign * numerator / eta[base] ** 2)
    return np.array(rows)


@dataclass
class VolumePhase:
    """Restricted residue form on a tangent triple."""

    value: complex
    chart: tuple[int, int]

    @property
    def deviation(self) -> float:
        return float(abs(self.value.imag) / abs(self.value))

    @property
    def line_angle(self) -> float:
        """Phase modulo pi."""
        return float(np.angle(self.value) % np.pi)


def best_chart(eta: np.ndarray) -> tuple[int, int]:
    return PAIRS[int(np.argmax(np.abs(eta)))]


def volume_form_value(
    point: RealLocusPoint, basis: np.ndarray, pivot: int | None = None
) -> VolumePhase:
    basis = _check_basis(point, basis)
    chart = best_chart(point.eta)
    tangents = basis @ chart_jacobian(point.frame, chart).T
    hypersurface_point = _hypersurface_point(point, chart)
    value = residue_form(point.coefficients, hypersurface_point, tangents, pivot=pivot)
    return VolumePhase(value, chart)


def volume_form_phase(point: RealLocusPoint, basis: np.ndarray) -> float:
    """|Im z| / |z| for z the residue form on the pushed-forward tangent triple."""
    return volume_form_value(point, basis).deviation


def _hypersurface_point(point: RealLocusPoint, chart: tuple[int, int]) -> HypersurfacePoint:
    zeta = chart_point_from_eta(point.eta, chart).zeta
    return HypersurfacePoint.from_zeta(point.coefficients, chart, zeta)


def volume_form_pivots(point: RealLocusPoint, basis: np.ndarray) -> list[VolumePhase]:
    """Residue form values for every pivot whose partial is nonzero, largest partial first."""
    order = pivot_order(
        point.coefficients,
        _hypersurface_point(point, best_chart(point.eta)),
        threshold=SINGULAR_TOLERANCE,
    )
    return [volume_form_value(point, basis, q) for q in order]


def pivot_gap(point: RealLocusPoint, basis: np.ndarray) -> float | None:
    """Largest relative gap to the largest-pivot value; None with a single usable pivot."""
    values = [phase.value for phase in volume_form_pivots(point, basis)]
    if len(values) < 2:
        return None
    return float(max(abs(values[0] - v) for v in values[1:]) / abs(values[0]))


def overlap_residue_gap(point: RealLocusPoint, basis: np.ndarray) -> float:
    """Residue chart consistency between the two charts with the largest minors."""
    basis = _check_basis(point, basis)
    first, second = (PAIRS[int(i)] for i in np.argsort(-np.abs(point.eta), kind="stable")[:2])
    tangents = basis @ chart_jacobian(point.frame, first).T
    return residue_chart_consistency(
        point.coefficients, _hypersurface_point(point, first), second, tangents
    )


def line_angle_spread(angles: Sequence[float]) -> float:
    """Largest distance (mod pi) of any line angle from their circular median."""
    angles = np.asarray(angles, dtype=float)
    reference = angles[0]
    offsets = (angles - reference + np.pi / 2) % np.pi - np.pi / 2
    center = np.median(offsets)
    return float(np.max(np.abs((offsets - center + np.pi / 2) % np.pi - np.pi / 2)))


def projective_class(v: Sequence[float]) -> np.ndarray:
    """Unit representative of the line through v, first significant entry positive."""
    v = np.asarray(v, dtype=float)
    norm = float(np.linalg.norm(v))
    if norm == 0:
        raise DegenerateBaseError("zero vector has no projective class")
    v = v / norm
    index = int(np.flatnonzero(np.abs(v) > PROJECTION_TOLERANCE)[0])
    return v if v[index] > 0 else -v


def projective_angle(a: Sequence[float], b: Sequence[float]) -> float:
    """Angle between the lines through a and b in RP^2."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.arctan2(np.linalg.norm(np.cross(a, b)), abs(np.dot(a, b))))


def base_projection(point: RealLocusPoint) -> np.ndarray:
    """Class of u0 x u0' in RP^2."""
    u0, u0_prime = point.u0, point.u0_prime
    w = np.cross(u0, u0_prime)
    if np.linalg.norm(w) <= PROJECTION_TOLERANCE * np.linalg.norm(u0) * np.linalg.norm(u0_prime):
        raise DegenerateBaseError("u0 and u0' are parallel")
    return projective_class(w)


def normalize_base(w: Sequence[float], w_prime: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Rescale w' so that |w x w'|_4^4 = 1."""
    w = np.asarray(w, dtype=float)
    w_prime = np.asarray(w_prime, dtype=float)
    size = quartic_norm(np.cross(w, w_prime))
    if size <= PROJECTION_TOLERANCE:
        raise DegenerateBaseError("base vectors are parallel")
    return w, w_prime * size**-0.25


def fiber_point(w: np.ndarray, w_prime: np.ndarray, theta: float) -> RealLocusPoint:
    """Point of the fiber over [w x w'] at angle theta on the quartic circle."""
    direction = np.cos(theta) * w - np.sin(theta) * w_prime
    radius = quartic_norm(direction) ** -0.25
    alpha, alpha_prime = radius * np.sin(theta), radius * np.cos(theta)
    frame = Frame(np.concatenate([[alpha], w]), np.concatenate([[alpha_prime], w_prime]))
    return RealLocusPoint.from_frame(STANDARD, frame)


def fiber_samples(w: Sequence[float], w_prime: Sequence[float], m: int) -> list[RealLocusPoint]:
    """m points at equally spaced angles on the fiber circle |alpha' w - alpha w'|_4 = 1."""
    if m < 3:
        raise LocusError(f"a fiber needs at least 3 samples, got {m}")
    w = np.asarray(w, dtype=float)
    w_prime = np.asarray(w_prime, dtype=float)
    if abs(quartic_norm(np.cross(w, w_prime)) - 1) > LOCUS_TOLERANCE:
        raise DegenerateBaseError("base not normalized: |w x w'|_4^4 != 1")
    return [fiber_point(w, w_prime, 2 * np.pi * k / m) for k in range(m)]


def eta_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Distance between the classes of a and b in P^5, up to sign."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def loop_closure_ratio(points: Sequence[RealLocusPoint]) -> float:
    """Chord from the last sample back to the first over the longest interior chord.

    Samples of a closed loop give a ratio near 1; an open arc gives a large one.
    """
    if len(points) < 3:
        raise LocusError(f"a loop needs at least 3 samples, got {len(points)}")
    chords = [eta_distance(a.eta, b.eta) for a, b in zip(points, points[1:])]
    longest = max(chords)
    if longest == 0:
        raise LocusError("fiber samples coincide")
    return eta_distance(points[-1].eta, points[0].eta) / longest


@dataclass
class LocusSummary:
    """Residual statistics for a batch of points."""

    count: int
    max_residual: float
    max_hypersurface_residual: float
    failures: list[int] = field(default_factory=list)


def summarize(points: Sequence[RealLocusPoint]) -> LocusSummary:
    failures = [i for i, p in enumerate(points) if p.hypersurface_residual() >= 1e-9]
    return LocusSummary(
        count=len(points),
        max_residual=max(p.max_residual for p in points),
        max_hypersurface_residual=max(p.hypersurface_residual() for p in points),
        failures=failures,
    )
