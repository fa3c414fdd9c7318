"""SO(3) and quaternion pictures of the standard real locus.

With u = (eta_0, eta_1, eta_2) and v = (eta_5, -eta_4, eta_3) the Klein quadric reads
u . v = 0, so a normalized locus point gives the orthonormal triple
(u/|u|, v/|v|, u/|u| x v/|v|). Flipping the sign of eta is right multiplication by
sigma = diag(-1, -1, 1), which lifts to right multiplication by k on unit quaternions;
each point therefore determines a right coset of {1, k, -1, -k}.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation as ScipyRotation

from slag.logger import get_logger
from slag.reallocus import RealLocusPoint, base_projection, projective_angle, projective_class

logger = get_logger(__name__)

ORTHONORMAL_TOLERANCE = 1e-10
UNIT_TOLERANCE = 1e-12


class QuotientError(Exception):
    """Quotient model error."""

    pass


@dataclass(frozen=True, eq=False)
class Rotation:
    """Proper orthogonal 3x3 matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (3, 3):
            raise QuotientError(f"rotation must be 3x3, got {matrix.shape}")
        if np.abs(matrix.T @ matrix - np.eye(3)).max() > ORTHONORMAL_TOLERANCE:
            raise QuotientError("columns are not orthonormal")
        if abs(np.linalg.det(matrix) - 1) > ORTHONORMAL_TOLERANCE:
            raise QuotientError("determinant is not +1")
        object.__setattr__(self, "matrix", matrix)

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return Rotation(self.matrix @ other.matrix)

    def distance(self, other: "Rotation") -> float:
        return float(np.abs(self.matrix - other.matrix).max())


# sigma = diag(-1, -1, 1): rotation by pi about the z-axis
SIGMA = Rotation(np.diag([-1.0, -1.0, 1.0]))


@dataclass(frozen=True, eq=False)
class UnitQuaternion:
    """(w, x, y, z) acting on R^3 by v -> q v q^-1."""

    components: np.ndarray

    def __post_init__(self):
        components = np.asarray(self.components, dtype=float)
        if components.shape != (4,):
            raise QuotientError(f"quaternion needs 4 components, got {components.shape}")
        if abs(np.linalg.norm(components) - 1) > UNIT_TOLERANCE:
            raise QuotientError("quaternion is not a unit quaternion")
        object.__setattr__(self, "components", components)

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        return UnitQuaternion(hamilton_product(self.components, other.components))

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.components)

    def rotation(self) -> Rotation:
        w, x, y, z = self.components
        return Rotation(ScipyRotation.from_quat([x, y, z, w]).as_matrix())


QUATERNION_K = UnitQuaternion(np.array([0.0, 0.0, 0.0, 1.0]))


def hamilton_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    pw, pv = p[0], p[1:]
    qw, qv = q[0], q[1:]
    return np.concatenate([[pw * qw - pv @ qv], pw * qv + qw * pv + np.cross(pv, qv)])


def uv_split(eta: np.ndarray, tolerance: float = ORTHONORMAL_TOLERANCE):
    """(u, v) = ((eta_0, eta_1, eta_2), (eta_5, -eta_4, eta_3)); u . v is the quadric."""
    eta = np.asarray(eta, dtype=float)
    u = eta[:3].copy()
    v = np.array([eta[5], -eta[4], eta[3]])
    norm_u, norm_v = np.linalg.norm(u), np.linalg.norm(v)
    if norm_u == 0 or norm_v == 0:
        raise QuotientError("u or v vanishes")
    if abs(u @ v) > tolerance * norm_u * norm_v:
        raise QuotientError(f"u and v are not orthogonal (u.v = {u @ v:.3e}): off the quadric")
    return u, v


def so3_matrix(u: np.ndarray, v: np.ndarray, tolerance: float = ORTHONORMAL_TOLERANCE) -> Rotation:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    norm_u, norm_v = np.linalg.norm(u), np.linalg.norm(v)
    if norm_u == 0 or norm_v == 0:
        raise QuotientError("zero input vector")
    if abs(u @ v) > tolerance * norm_u * norm_v:
        raise QuotientError("input vectors are not orthogonal")
    first, second = u / norm_u, v / norm_v
    return Rotation(np.column_stack([first, second, np.cross(first, second)]))


def quaternion_lift(rotation: Rotation) -> tuple[UnitQuaternion, UnitQuaternion]:
    """The two unit quaternions over a rotation, scalar part made nonnegative first."""
    x, y, z, w = ScipyRotation.from_matrix(rotation.matrix).as_quat()
    components = np.array([w, x, y, z])
    components /= np.linalg.norm(components)
    if components[0] < 0:
        components = -components
    q = UnitQuaternion(components)
    return q, -q


@dataclass(frozen=True, eq=False)
class Z4Coset:
    """The four lifts {q, -q, qk, -qk} of a locus point."""

    elements: np.ndarray

    def closure_residual(self) -> float:
        """How far right multiplication by k is from permuting the set."""
        k = QUATERNION_K.components
        return max(
            float(np.min(np.linalg.norm(self.elements - hamilton_product(e, k), axis=1)))
            for e in self.elements
        )

    def distance(self, other: "Z4Coset") -> float:
        """Symmetric Hausdorff distance between the two 4-element sets."""
        gaps = np.linalg.norm(self.elements[:, None, :] - other.elements[None, :, :], axis=2)
        return float(max(gaps.min(axis=1).max(), gaps.min(axis=0).max()))

    def to_list(self) -> list[list[float]]:
        return [[float(x) for x in e] for e in self.elements]


def z4_coset_of_rotation(rotation: Rotation) -> Z4Coset:
    q, minus_q = quaternion_lift(rotation)
    q_sigma, minus_q_sigma = quaternion_lift(rotation @ SIGMA)
    return Z4Coset(
        np.array(
            [q.components, minus_q.components, q_sigma.components, minus_q_sigma.components]
        )
    )


def point_rotation(point: RealLocusPoint) -> Rotation:
    return so3_matrix(*uv_split(point.eta))


def z4_coset(point: RealLocusPoint) -> Z4Coset:
    return z4_coset_of_rotation(point_rotation(point))


def bundle_projection_consistency(point: RealLocusPoint) -> float:
    """Largest RP^2 angle between the SO(3) columns and the frame-side classes.

    Column 1 is the class of u ~ alpha' u0 - alpha u0' (the fiber direction) and
    column 2 the class of v ~ u0 x u0' (the base point).
    """
    rotation = point_rotation(point)
    fiber_direction = projective_class(point.alpha_prime * point.u0 - point.alpha * point.u0_prime)
    return max(
        projective_angle(rotation.matrix[:, 0], fiber_direction),
        projective_angle(rotation.matrix[:, 1], base_projection(point)),
    )
