"""Alternating multi-view registration driver.

Each iteration: assign all aligned points to their nearest centroid, fit
the per-cluster Gaussians, then update every scan's transform in index
order against the models frozen at the start of the iteration. Scan 0 is
the fixed reference frame and is never updated. The loop stops when the
log-likelihood change falls below the tolerance or the iteration cap is
reached.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .clustering import (
    DEFAULT_EPSILON,
    NdtCell,
    assign_clusters,
    choose_k,
    compute_ndts,
    init_centroids,
    ndt_arrays,
)
from .geometry import RigidTransform, is_rigid
from .io import PointSet
from .solver import build_qp, log_likelihood, solve_perturbation, update_transform


class RegistrationError(RuntimeError):
    """Registration cannot proceed (bad inputs or degenerate clustering)."""


@dataclass
class RegistrationConfig:
    max_iterations: int = 300
    likelihood_tolerance: float = 1e-6
    k_override: int | None = None
    epsilon_reg: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.likelihood_tolerance <= 0.0:
            raise ValueError("likelihood_tolerance must be > 0")
        if self.epsilon_reg <= 0.0:
            raise ValueError("epsilon_reg must be > 0")
        if self.k_override is not None and self.k_override < 1:
            raise ValueError("k_override must be >= 1")


@dataclass
class IterationRecord:
    iteration: int
    log_likelihood: float
    valid_clusters: int
    step_norms: list[float]


@dataclass
class RegistrationState:
    transforms: list[RigidTransform]
    labels: list[np.ndarray]
    ndts: list[NdtCell]
    likelihood_trace: list[float] = field(default_factory=list)
    iteration: int = 0
    records: list[IterationRecord] = field(default_factory=list)


def default_k(point_sets: list[PointSet], config: RegistrationConfig | None = None) -> int:
    """Cluster count: the config override when set, otherwise choose_k."""
    if config is not None and config.k_override is not None:
        return config.k_override
    return choose_k(point_sets)


def register(
    point_sets: list[PointSet],
    initial_transforms: list[RigidTransform],
    config: RegistrationConfig | None = None,
) -> tuple[list[RigidTransform], RegistrationState]:
    """Jointly register M >= 2 scans; returns (final transforms, state).

    The first scan's transform is returned exactly as it was given; all
    choices are deterministic, so identical inputs produce identical output.
    """
    config = config or RegistrationConfig()
    m = len(point_sets)
    if m < 2:
        raise RegistrationError(f"need at least 2 scans, got {m}")
    if len(initial_transforms) != m:
        raise RegistrationError(
            f"{m} scans but {len(initial_transforms)} initial transforms"
        )
    for i, t in enumerate(initial_transforms):
        if not is_rigid(t, tol=1e-6):
            raise RegistrationError(f"initial transform {i} is not a rigid motion")

    k = default_k(point_sets, config)
    centroids = init_centroids(point_sets, initial_transforms, k)
    transforms = list(initial_transforms)
    trace: list[float] = []
    records: list[IterationRecord] = []
    labels: list[np.ndarray] = []
    ndts: list[NdtCell] = []

    iteration = 0
    for iteration in range(1, config.max_iterations + 1):
        labels = assign_clusters(point_sets, transforms, centroids)
        ndts = compute_ndts(point_sets, transforms, labels, centroids, config.epsilon_reg)
        means, infos, valid = ndt_arrays(ndts)
        if not valid.any():
            raise RegistrationError(
                f"all {len(ndts)} clusters invalid at iteration {iteration}"
            )
        if iteration == 1:
            for ps, lab in zip(point_sets, labels):
                if not valid[lab].any():
                    raise RegistrationError(
                        f"scan '{ps.id}' has no points in valid clusters at iteration 1"
                    )

        step_norms = [0.0]
        for i in range(1, m):
            lab = labels[i]
            mask = valid[lab]
            if not mask.any():
                step_norms.append(0.0)
                continue
            picked = lab[mask]
            qp = build_qp(
                point_sets[i].points[mask], means[picked], infos[picked], transforms[i]
            )
            xi = solve_perturbation(qp)
            transforms[i] = update_transform(transforms[i], xi)
            step_norms.append(float(np.linalg.norm(xi)))

        likelihood = log_likelihood(point_sets, transforms, labels, ndts)
        trace.append(likelihood)
        records.append(
            IterationRecord(iteration, likelihood, int(valid.sum()), step_norms)
        )
        centroids = means  # valid: new mean; invalid: centroid carried over
        if iteration >= 2 and abs(trace[-1] - trace[-2]) < config.likelihood_tolerance:
            break

    state = RegistrationState(
        transforms=list(transforms),
        labels=labels,
        ndts=ndts,
        likelihood_trace=trace,
        iteration=iteration,
        records=records,
    )
    return list(transforms), state
