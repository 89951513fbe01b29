"""Registration accuracy against ground-truth transforms.

Rotation error is the mean geodesic angle acos((trace(Rm Rg') - 1) / 2)
over scans, with the acos argument clamped to [-1, 1]; translation error is
the mean Euclidean distance between translation vectors.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import RigidTransform


@dataclass(frozen=True)
class ScanError:
    scan: str
    rotation_angle: float
    translation_distance: float


@dataclass(frozen=True)
class ErrorReport:
    rotation_error: float
    translation_error: float
    per_scan: list[ScanError]


def _check_lengths(measured, truth):
    if len(measured) != len(truth):
        raise ValueError(
            f"length mismatch: {len(measured)} measured vs {len(truth)} truth transforms"
        )
    if len(measured) == 0:
        raise ValueError("empty transform lists")


def _angle(measured: RigidTransform, truth: RigidTransform) -> float:
    cos_angle = 0.5 * (np.trace(measured.rotation @ truth.rotation.T) - 1.0)
    return float(np.arccos(np.clip(cos_angle, -1.0, 1.0)))


def rotation_error(measured, truth) -> float:
    """Mean geodesic rotation angle in radians."""
    _check_lengths(measured, truth)
    return float(np.mean([_angle(m, g) for m, g in zip(measured, truth)]))


def translation_error(measured, truth) -> float:
    """Mean Euclidean distance between translations, in scan units."""
    _check_lengths(measured, truth)
    return float(
        np.mean([np.linalg.norm(m.translation - g.translation) for m, g in zip(measured, truth)])
    )


def error_report(measured, truth, ids=None) -> ErrorReport:
    """Per-scan breakdown plus the two mean errors."""
    _check_lengths(measured, truth)
    if ids is None:
        ids = [str(i) for i in range(len(measured))]
    per_scan = [
        ScanError(
            scan=str(scan_id),
            rotation_angle=_angle(m, g),
            translation_distance=float(np.linalg.norm(m.translation - g.translation)),
        )
        for scan_id, m, g in zip(ids, measured, truth)
    ]
    return ErrorReport(
        rotation_error=float(np.mean([e.rotation_angle for e in per_scan])),
        translation_error=float(np.mean([e.translation_distance for e in per_scan])),
        per_scan=per_scan,
    )


def write_report_csv(report: ErrorReport, path) -> None:
    """CSV with one row per scan and a trailing mean summary row."""
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["scan", "rot_err_rad", "trans_err"])
        for entry in report.per_scan:
            writer.writerow(
                [entry.scan, f"{entry.rotation_angle:.12g}", f"{entry.translation_distance:.12g}"]
            )
        writer.writerow(
            ["mean", f"{report.rotation_error:.12g}", f"{report.translation_error:.12g}"]
        )
