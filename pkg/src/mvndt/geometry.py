"""SO(3)/SE(3) primitives: skew operator, exponential map, retraction, group action.

Twists are plain length-6 float arrays with the rotational part first:
``xi = (xi_r, xi_t)``. All functions here are pure; transforms are immutable
and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Below this rotation magnitude the Rodrigues coefficients are replaced by
# their second-order Taylor forms to avoid dividing by ~0.
SMALL_ANGLE = 1e-10

# Orthogonality drift (element-wise) above which compose() re-projects the
# rotation onto SO(3).
ORTHO_DRIFT = 1e-9


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Rigid motion p -> rotation @ p + translation.

    rotation is 3x3 with rotation.T @ rotation = I and det = +1;
    translation is a 3-vector in the same length unit as the scans.
    """

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = np.array(self.rotation, dtype=np.float64)
        translation = np.array(self.translation, dtype=np.float64)
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise ValueError("rotation must be 3x3 and translation a 3-vector")
        rotation.flags.writeable = False
        translation.flags.writeable = False
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    def as_matrix(self) -> np.ndarray:
        """4x4 homogeneous form."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m


def rotation_defect(rotation: np.ndarray) -> float:
    """Largest element-wise deviation of R.T @ R from the identity."""
    return float(np.abs(rotation.T @ rotation - np.eye(3)).max())


def is_rigid(transform: RigidTransform, tol: float = 1e-9) -> bool:
    """True when the rotation block is orthonormal with det +1 within tol."""
    r = transform.rotation
    if not (np.isfinite(r).all() and np.isfinite(transform.translation).all()):
        return False
    return rotation_defect(r) <= tol and abs(np.linalg.det(r) - 1.0) <= tol


def skew(v) -> np.ndarray:
    """Cross-product matrix: skew(v) @ w == np.cross(v, w). Antisymmetric."""
    x, y, z = np.asarray(v, dtype=np.float64)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def skew_many(vs: np.ndarray) -> np.ndarray:
    """Batched skew: (N, 3) -> (N, 3, 3)."""
    vs = np.asarray(vs, dtype=np.float64)
    out = np.zeros(vs.shape[:-1] + (3, 3))
    x, y, z = vs[..., 0], vs[..., 1], vs[..., 2]
    out[..., 0, 1] = -z
    out[..., 0, 2] = y
    out[..., 1, 0] = z
    out[..., 1, 2] = -x
    out[..., 2, 0] = -y
    out[..., 2, 1] = x
    return out


def so3_exp(w) -> np.ndarray:
    """Rodrigues rotation from an axis-angle 3-vector.

    Falls back to the second-order Taylor expansion I + W + W^2/2 when
    ||w|| < SMALL_ANGLE.
    """
    w = np.asarray(w, dtype=np.float64)
    theta = float(np.linalg.norm(w))
    s = skew(w)
    if theta < SMALL_ANGLE:
        return np.eye(3) + s + 0.5 * (s @ s)
    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / (theta * theta)
    return np.eye(3) + a * s + b * (s @ s)


def retract(xi) -> RigidTransform:
    """Lift a twist (xi_r, xi_t) to SE(3): rotation so3_exp(xi_r), translation xi_t."""
    xi = np.asarray(xi, dtype=np.float64)
    return RigidTransform(so3_exp(xi[:3]), xi[3:])


def apply(transform: RigidTransform, v) -> np.ndarray:
    """Group action on a single 3-vector: R @ v + t."""
    return transform.rotation @ np.asarray(v, dtype=np.float64) + transform.translation


def apply_many(transform: RigidTransform, points: np.ndarray) -> np.ndarray:
    """Group action on an (N, 3) array of points."""
    return np.asarray(points, dtype=np.float64) @ transform.rotation.T + transform.translation


def invert(transform: RigidTransform) -> RigidTransform:
    rt = transform.rotation.T
    return RigidTransform(rt, -(rt @ transform.translation))


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    """a after b: rotation R_a @ R_b, translation R_a @ t_b + t_a.

    Re-projects the rotation onto the nearest element of SO(3) (polar
    factor) only when the orthogonality defect exceeds ORTHO_DRIFT, so
    short chains stay bit-stable.
    """
    rotation = a.rotation @ b.rotation
    if rotation_defect(rotation) > ORTHO_DRIFT:
        u, _, vt = np.linalg.svd(rotation)
        if np.linalg.det(u @ vt) < 0.0:
            u[:, -1] = -u[:, -1]
        rotation = u @ vt
    return RigidTransform(rotation, a.rotation @ b.translation + a.translation)
