"""Multi-view point-set registration with clustered Gaussian surface models.

Scans are registered jointly: all aligned points are clustered, each
cluster is summarized by a normal distribution, and every scan's rigid
transform is updated in turn by a linearized twist step that maximizes the
resulting log-likelihood, alternating until convergence.
"""

from .clustering import NdtCell, assign_clusters, choose_k, compute_ndts, init_centroids
from .geometry import RigidTransform, apply, compose, invert, retract, skew, so3_exp
from .io import (
    FileFormatError,
    PointSet,
    downsample_uniform,
    load_ply_ascii,
    load_transforms,
    load_xyz,
    save_transforms,
)
from .metrics import ErrorReport, error_report, rotation_error, translation_error
from .registration import (
    RegistrationConfig,
    RegistrationError,
    RegistrationState,
    default_k,
    register,
)
from .solver import QpSystem, build_qp, log_likelihood, residual, solve_perturbation, update_transform
from .synthetic import SyntheticScene, make_scene, write_scene

__version__ = "0.1.0"

__all__ = [
    "ErrorReport",
    "FileFormatError",
    "NdtCell",
    "PointSet",
    "QpSystem",
    "RegistrationConfig",
    "RegistrationError",
    "RegistrationState",
    "RigidTransform",
    "SyntheticScene",
    "apply",
    "assign_clusters",
    "build_qp",
    "choose_k",
    "compose",
    "compute_ndts",
    "default_k",
    "downsample_uniform",
    "error_report",
    "init_centroids",
    "invert",
    "load_ply_ascii",
    "load_transforms",
    "load_xyz",
    "log_likelihood",
    "make_scene",
    "register",
    "residual",
    "retract",
    "rotation_error",
    "save_transforms",
    "skew",
    "so3_exp",
    "solve_perturbation",
    "translation_error",
    "update_transform",
    "write_scene",
]
