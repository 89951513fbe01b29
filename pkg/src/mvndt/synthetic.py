"""Seeded synthetic multi-view benchmark scenes with exact ground truth.

The surface combines a bumpy lobed blob, a rippled tilted sheet, and a
fluted offset column: three regions with visibly different local
covariances, each carrying enough relief that no rigid motion slides the
scene near itself. Scan i samples an azimuth window centred at 2*pi*i/M
spanning WINDOW_SPAN spacings, so consecutive scans share well over half
their coverage while none sees the full circle. Each scan is stored in its
own frame; the ground-truth transform maps it back to the world frame.
Initial transforms are the ground truth perturbed on the right by a
bounded random twist; scan 0 stays unperturbed so the fixed reference
frame of the registration matches the ground-truth gauge.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import RigidTransform, apply_many, compose, invert, so3_exp
from .io import PointSet, save_transforms

BLOB_RADIUS = 1.0
BLOB_LOBES = (0.18, 0.1)
BLOB_Z_SCALE = 0.75
BUMP_COUNT = 70
BUMP_WIDTHS = (0.12, 0.3)
BUMP_AMPLITUDE = 0.15
PLANE_Z = -0.9
PLANE_TILT = (0.15, -0.1)
PLANE_RADII = (0.45, 1.05)
CYLINDER_AXIS = (0.45, -0.2)
CYLINDER_RADIUS = 0.35
CYLINDER_Z = (-0.9, -0.1)

# Each scan's azimuth window spans this many window spacings.
WINDOW_SPAN = 4.0


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    point_sets: list[PointSet]
    ground_truth: list[RigidTransform]
    initial: list[RigidTransform]
    diagonal: float


def _unit_vector(rng) -> np.ndarray:
    v = rng.normal(size=3)
    norm = np.linalg.norm(v)
    while norm < 1e-12:
        v = rng.normal(size=3)
        norm = np.linalg.norm(v)
    return v / norm


def _bump_field(rng) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random smooth relief on the blob: centers, angular widths, amplitudes."""
    raw = rng.normal(size=(BUMP_COUNT, 3))
    centers = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    widths = rng.uniform(BUMP_WIDTHS[0], BUMP_WIDTHS[1], size=BUMP_COUNT)
    amplitudes = rng.uniform(-BUMP_AMPLITUDE, BUMP_AMPLITUDE, size=BUMP_COUNT)
    return centers, widths, amplitudes


def _blob_radius(dirs: np.ndarray, bumps) -> np.ndarray:
    # Low-order lobes give global asymmetry; dense Gaussian bumps add relief
    # at every orientation, so no small rotation maps the surface near
    # itself and every twist direction is constrained, even under noise.
    centers, widths, amplitudes = bumps
    az = np.arctan2(dirs[:, 1], dirs[:, 0])
    polar = np.arccos(np.clip(dirs[:, 2], -1.0, 1.0))
    angles = np.arccos(np.clip(dirs @ centers.T, -1.0, 1.0))
    relief = (amplitudes * np.exp(-0.5 * (angles / widths) ** 2)).sum(axis=1)
    return (
        BLOB_RADIUS
        + BLOB_LOBES[0] * np.cos(2.0 * az)
        + BLOB_LOBES[1] * np.sin(3.0 * az) * np.cos(2.0 * polar)
        + relief
    )


def _sample_window(rng, n: int, center: float, width: float, bumps) -> np.ndarray:
    """World-frame surface points inside one azimuth window.

    The components (bumpy blob, rippled tilted sheet, fluted offset column)
    carry relief at many scales and orientations, so tangential sliding
    costs likelihood and the registration optimum is isolated; their local
    covariances stay visibly different (closed bumpy shell vs near-plane vs
    tube).
    """
    azimuth = rng.uniform(center - width / 2.0, center + width / 2.0, size=n)
    kind = rng.uniform(size=n)
    pts = np.empty((n, 3))

    blob = kind < 0.6
    az = azimuth[blob]
    cos_polar = rng.uniform(-0.85, 0.85, size=int(blob.sum()))
    sin_polar = np.sqrt(1.0 - cos_polar**2)
    dirs = np.column_stack([sin_polar * np.cos(az), sin_polar * np.sin(az), cos_polar])
    pts[blob] = _blob_radius(dirs, bumps)[:, None] * dirs
    pts[blob, 2] *= BLOB_Z_SCALE

    plane = (kind >= 0.6) & (kind < 0.8)
    az = azimuth[plane]
    r = np.sqrt(rng.uniform(PLANE_RADII[0] ** 2, PLANE_RADII[1] ** 2, size=int(plane.sum())))
    x, y = r * np.cos(az), r * np.sin(az)
    ripple = 0.06 * np.cos(14.0 * x) * np.cos(11.0 * y)
    pts[plane] = np.column_stack(
        [x, y, PLANE_Z + PLANE_TILT[0] * x + PLANE_TILT[1] * y + ripple]
    )

    cylinder = kind >= 0.8
    az = azimuth[cylinder]
    z = rng.uniform(CYLINDER_Z[0], CYLINDER_Z[1], size=int(cylinder.sum()))
    flute = CYLINDER_RADIUS + 0.06 * np.cos(7.0 * az + 10.0 * z)
    pts[cylinder] = np.column_stack(
        [
            CYLINDER_AXIS[0] + flute * np.cos(az),
            CYLINDER_AXIS[1] + flute * np.sin(az),
            z,
        ]
    )
    return pts


def make_scene(
    scans: int,
    points_per_scan: int,
    perturb_rot: float = 0.0,
    perturb_trans: float = 0.0,
    seed: int = 0,
) -> SyntheticScene:
    """Deterministic scene: M scans, ground truth, and perturbed initials.

    perturb_rot bounds the rotation angle (radians) and perturb_trans the
    translation norm of each per-scan initial perturbation. Magnitudes are
    drawn uniformly from the upper band [0.8*bound, bound) with uniform
    random axes, so the mean initial errors sit at the bound's order rather
    than half of it. The draw sequence does not depend on the bound values,
    so scenes with the same seed share the same surface.
    """
    if scans < 2:
        raise ValueError("scans must be >= 2")
    if points_per_scan < 100:
        raise ValueError("points_per_scan must be >= 100")
    if not 0.0 <= perturb_rot <= np.pi / 4.0:
        raise ValueError("perturb_rot must be in [0, pi/4]")
    if perturb_trans < 0.0:
        raise ValueError("perturb_trans must be >= 0")

    rng = np.random.default_rng(seed)
    bumps = _bump_field(rng)
    spacing = 2.0 * np.pi / scans
    world = [
        _sample_window(rng, points_per_scan, i * spacing, WINDOW_SPAN * spacing, bumps)
        for i in range(scans)
    ]

    ground_truth = []
    for _ in range(scans):
        rotation = so3_exp(_unit_vector(rng) * rng.uniform(0.0, 0.6))
        ground_truth.append(RigidTransform(rotation, rng.uniform(-0.5, 0.5, size=3)))

    initial = []
    for i in range(scans):
        angle = rng.uniform(0.8 * perturb_rot, perturb_rot)
        axis = _unit_vector(rng)
        shift = _unit_vector(rng) * rng.uniform(0.8 * perturb_trans, perturb_trans)
        if i == 0:
            initial.append(ground_truth[0])
        else:
            wobble = RigidTransform(so3_exp(axis * angle), shift)
            initial.append(compose(ground_truth[i], wobble))

    point_sets = [
        PointSet(f"scan_{i:02d}", apply_many(invert(ground_truth[i]), world[i]))
        for i in range(scans)
    ]
    stacked = np.vstack(world)
    diagonal = float(np.linalg.norm(stacked.max(axis=0) - stacked.min(axis=0)))
    return SyntheticScene(point_sets, ground_truth, initial, diagonal)


def write_scene(scene: SyntheticScene, outdir) -> dict[str, Path]:
    """Write per-scan XYZ files plus ground-truth and initial transform files.

    Output is byte-deterministic for a given scene.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    for ps in scene.point_sets:
        path = outdir / f"{ps.id}.xyz"
        with open(path, "w", encoding="utf-8") as fh:
            for x, y, z in ps.points:
                fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
        paths[ps.id] = path
    paths["ground_truth"] = outdir / "ground_truth.txt"
    save_transforms(paths["ground_truth"], scene.ground_truth)
    paths["initial"] = outdir / "initial.txt"
    save_transforms(paths["initial"], scene.initial)
    return paths
