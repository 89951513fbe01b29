"""Per-scan rigid-transform update via a linearized quadratic model.

Linearizing the rotation around the current estimate turns the weighted
residual sum into the quadratic xi' H xi + 2 b' xi + c over the twist xi,
with per-point coefficient blocks J_p = [-skew(R0 v + t0)  I]. The optimal
perturbation is the minimum-norm minimizer -pinv(H) b, applied to the
current transform through the retraction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .clustering import NdtCell, ndt_arrays
from .geometry import RigidTransform, apply, apply_many, compose, retract, skew_many

logger = logging.getLogger(__name__)

# Relative singular-value cutoff for the pseudo-inverse of the 6x6 system.
PINV_RCOND = 6e-12

# Rotation steps above this are scaled back; the linearization is only
# trustworthy for small perturbations.
MAX_ROTATION_STEP = np.pi / 2

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True, eq=False)
class QpSystem:
    """Quadratic model of the negative objective: xi' H xi + 2 b' xi + c."""

    hessian: np.ndarray
    gradient_half: np.ndarray
    constant: float


def residual(transform: RigidTransform, v, mu) -> np.ndarray:
    """Aligned point minus its cluster mean."""
    return apply(transform, v) - np.asarray(mu, dtype=np.float64)


def build_qp(points, means, informations, transform: RigidTransform) -> QpSystem:
    """Assemble H, b, c over the given points, summed in point order.

    points: (N, 3) scan-local points; means/informations: the (N, 3) and
    (N, 3, 3) per-point cluster model; transform: current estimate.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise ValueError("cannot build a QP from an empty point list")
    means = np.asarray(means, dtype=np.float64).reshape(-1, 3)
    infos = np.asarray(informations, dtype=np.float64).reshape(-1, 3, 3)

    aligned = apply_many(transform, pts)
    r0 = aligned - means
    blocks = np.zeros((pts.shape[0], 3, 6))
    blocks[:, :, :3] = -skew_many(aligned)
    blocks[:, :, 3:] = np.eye(3)

    weighted = infos @ blocks
    hessian = np.einsum("nji,njk->ik", blocks, weighted)
    hessian = 0.5 * (hessian + hessian.T)
    gradient_half = np.einsum("nji,nj->i", weighted, r0)
    weighted_r = np.einsum("nij,nj->ni", infos, r0)
    constant = float(np.einsum("ni,ni->", r0, weighted_r))
    return QpSystem(hessian, gradient_half, constant)


def solve_perturbation(qp: QpSystem) -> np.ndarray:
    """Minimum-norm minimizer of the quadratic model: -pinv(H) b.

    Rank deficiency (degenerate geometry) falls back to the minimum-norm
    solution through singular-value truncation. Oversized rotation steps are
    scaled down to MAX_ROTATION_STEP with a warning.
    """
    xi = -np.linalg.pinv(qp.hessian, rcond=PINV_RCOND) @ qp.gradient_half
    rot_norm = float(np.linalg.norm(xi[:3]))
    if rot_norm > MAX_ROTATION_STEP:
        logger.warning(
            "rotation step %.4f rad exceeds %.4f; scaling the twist down",
            rot_norm,
            MAX_ROTATION_STEP,
        )
        xi = xi * (MAX_ROTATION_STEP / rot_norm)
    return xi


def update_transform(t0: RigidTransform, xi) -> RigidTransform:
    """Apply a twist multiplicatively: retract(xi) composed with t0."""
    return compose(retract(xi), t0)


def log_likelihood(point_sets, transforms, labels, ndts: list[NdtCell]) -> float:
    """Sum of Gaussian log-densities of aligned points under their cluster model.

    Per point: 0.5*log|info| - 1.5*log(2*pi) - 0.5*(x-mean)' info (x-mean).
    Points in invalid clusters contribute 0. The log-determinant comes from
    a Cholesky factor of the information matrix, never from det().
    """
    means, infos, valid = ndt_arrays(ndts)
    half_logdet = np.zeros(len(ndts))
    if valid.any():
        chol = np.linalg.cholesky(infos[valid])
        half_logdet[valid] = np.log(np.diagonal(chol, axis1=1, axis2=2)).sum(axis=1)

    total = 0.0
    for ps, t, lab in zip(point_sets, transforms, labels):
        mask = valid[lab]
        if not mask.any():
            continue
        picked = lab[mask]
        d = apply_many(t, ps.points[mask]) - means[picked]
        quad = np.einsum("ni,nij,nj->n", d, infos[picked], d)
        total += float((half_logdet[picked] - 1.5 * LOG_2PI - 0.5 * quad).sum())
    return total
