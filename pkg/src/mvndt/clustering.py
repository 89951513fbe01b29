"""Point clustering and per-cluster normal-distribution models.

Each iteration of the registration loop assigns every aligned point to its
nearest centroid, then fits one Gaussian per cluster: mean, covariance of
the deviations, and the information matrix (covariance + eps*I)^-1. Only
clusters with more than MIN_CLUSTER_POINTS members get a model; the rest
are marked invalid, keep their previous centroid as assignment target, and
their member points are excluded from the likelihood and the pose updates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spatial
from .geometry import RigidTransform, apply_many
from .io import PointSet, stride_indices

# Cluster validity threshold: a model is fitted only when count > 5.
MIN_CLUSTER_POINTS = 5

# Tikhonov term added to the covariance before inversion.
DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True, eq=False)
class NdtCell:
    """Gaussian model of one cluster.

    For invalid cells (count <= MIN_CLUSTER_POINTS) the mean retains the
    input centroid, covariance is zero and information is a placeholder
    identity; neither enters the likelihood or the solver.
    """

    mean: np.ndarray
    information: np.ndarray
    covariance: np.ndarray
    count: int
    valid: bool


def ndt_arrays(ndts: list[NdtCell]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Stack a cell list into (means (K,3), informations (K,3,3), valid (K,))."""
    means = np.array([c.mean for c in ndts])
    infos = np.array([c.information for c in ndts])
    valid = np.array([c.valid for c in ndts], dtype=bool)
    return means, infos, valid


def choose_k(point_sets: list[PointSet]) -> int:
    """Cluster count giving an average of (6 + M) points per cluster."""
    m = len(point_sets)
    n = sum(len(ps) for ps in point_sets)
    return max(1, int(round(n / (m + 6))))


def _aligned_stack(point_sets, transforms) -> np.ndarray:
    return np.vstack([apply_many(t, ps.points) for ps, t in zip(point_sets, transforms)])


def init_centroids(point_sets, transforms, k: int) -> np.ndarray:
    """Initial centroids: uniform stride over all aligned points, scan order.

    Uses the same stride rule as downsample_uniform; the result can fall
    marginally short of k when rounding collides two indices.
    """
    aligned = _aligned_stack(point_sets, transforms)
    n = aligned.shape[0]
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the total point count {n}")
    return aligned[stride_indices(n, k)]


def assign_clusters(point_sets, transforms, centroids) -> list[np.ndarray]:
    """Label every point with its nearest centroid (exact, lowest-index ties).

    Returns one int64 label array per scan, aligned with that scan's points.
    """
    index = spatial.build(centroids)
    return [
        spatial.nearest_many(index, apply_many(t, ps.points))[0]
        for ps, t in zip(point_sets, transforms)
    ]


def compute_ndts(
    point_sets,
    transforms,
    labels: list[np.ndarray],
    centroids,
    epsilon: float = DEFAULT_EPSILON,
) -> list[NdtCell]:
    """Fit one NdtCell per centroid from the labelled, aligned points.

    Means and covariances are plain per-cluster averages of the aligned
    points and of the outer products of their deviations. The information
    matrix solves (cov + epsilon*I) X = I and is symmetrized, which keeps it
    SPD even for coplanar clusters.
    """
    centroids = np.asarray(centroids, dtype=np.float64)
    k = centroids.shape[0]
    aligned = _aligned_stack(point_sets, transforms)
    lab = np.concatenate(labels)

    counts = np.bincount(lab, minlength=k)
    valid = counts > MIN_CLUSTER_POINTS
    denom = np.maximum(counts, 1).astype(np.float64)

    sums = np.column_stack(
        [np.bincount(lab, weights=aligned[:, a], minlength=k) for a in range(3)]
    )
    means = np.where(valid[:, None], sums / denom[:, None], centroids)

    deltas = aligned - means[lab]
    cov = np.zeros((k, 3, 3))
    for a in range(3):
        for b in range(a, 3):
            s = np.bincount(lab, weights=deltas[:, a] * deltas[:, b], minlength=k)
            cov[:, a, b] = s
            cov[:, b, a] = s
    cov /= denom[:, None, None]
    cov[~valid] = 0.0

    info = np.tile(np.eye(3), (k, 1, 1))
    if valid.any():
        regularized = cov[valid] + epsilon * np.eye(3)
        solved = np.linalg.solve(regularized, np.tile(np.eye(3), (regularized.shape[0], 1, 1)))
        info[valid] = 0.5 * (solved + solved.transpose(0, 2, 1))

    return [
        NdtCell(
            mean=means[j],
            information=info[j],
            covariance=cov[j],
            count=int(counts[j]),
            valid=bool(valid[j]),
        )
        for j in range(k)
    ]
