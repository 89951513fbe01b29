"""Exact nearest-centroid queries over a static k-d tree.

Ties (equal squared distance) are broken by the lowest original centroid
index, so results match a linear scan with first-minimum argmin exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree


@dataclass(frozen=True, eq=False)
class CentroidIndex:
    """Immutable index over K centroids; concurrent queries are safe."""

    centroids: np.ndarray
    tree: cKDTree

    def __len__(self) -> int:
        return self.centroids.shape[0]


def build(centroids) -> CentroidIndex:
    pts = np.array(centroids, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] == 0:
        raise ValueError("centroids must be a non-empty (K, 3) array")
    if not np.isfinite(pts).all():
        raise ValueError("centroids contain non-finite coordinates")
    pts.flags.writeable = False
    return CentroidIndex(pts, cKDTree(pts))


def _sq_dist(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # Same expression a brute-force scan would use, so equality semantics agree.
    d = points - centroids
    return (d * d).sum(axis=-1)


def _resolve_tie(index: CentroidIndex, point: np.ndarray, sq_upper: float) -> tuple[int, float]:
    # Collect every centroid at (or within rounding slop of) the best distance
    # and re-rank with exact arithmetic; lowest index wins.
    radius = math.sqrt(sq_upper) * (1.0 + 1e-9) + 1e-300
    candidates = sorted(index.tree.query_ball_point(point, radius))
    d2 = _sq_dist(point, index.centroids[candidates])
    pick = int(np.argmin(d2))
    return candidates[pick], float(d2[pick])


def nearest_many(index: CentroidIndex, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Exact nearest centroid for each row of an (N, 3) array.

    Returns (labels, squared distances).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    k = len(index)
    if k == 1:
        labels = np.zeros(pts.shape[0], dtype=np.int64)
        return labels, _sq_dist(pts, index.centroids[0])
    _, ii = index.tree.query(pts, k=2)
    labels = ii[:, 0].astype(np.int64)
    best = _sq_dist(pts, index.centroids[labels])
    runner_up = _sq_dist(pts, index.centroids[ii[:, 1]])
    ambiguous = np.nonzero(runner_up <= best)[0]
    for row in ambiguous:
        labels[row], best[row] = _resolve_tie(
            index, pts[row], min(best[row], runner_up[row])
        )
    return labels, best


def nearest(index: CentroidIndex, point) -> tuple[int, float]:
    """Exact nearest centroid of a single 3-vector: (index, squared distance)."""
    labels, d2 = nearest_many(index, np.asarray(point, dtype=np.float64)[None, :])
    return int(labels[0]), float(d2[0])
