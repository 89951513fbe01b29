"""Scan loading (XYZ / ASCII PLY), uniform downsampling, transform files.

Transform files are plain text, one line per scan:
``idx r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2``
i.e. the row-major 3x4 matrix [R | t] prefixed by the 0-based scan index.
Values are written with 17 significant digits so a save/load round trip is
bit exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import RigidTransform, rotation_defect

# Orthonormality slack accepted when reading rotation blocks from disk.
ROTATION_FILE_TOL = 1e-6


class FileFormatError(ValueError):
    """A scan or transform file does not match its expected format."""


@dataclass(frozen=True, eq=False)
class PointSet:
    """One scan: an identifier plus an ordered (N, 3) array of points."""

    id: str
    points: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError(f"points must be (N, 3), got {points.shape}")
        if points.shape[0] == 0:
            raise ValueError(f"point set '{self.id}' is empty")
        if not np.isfinite(points).all():
            raise ValueError(f"point set '{self.id}' contains non-finite coordinates")
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return self.points.shape[0]


def load_xyz(path) -> PointSet:
    """Read whitespace-separated "x y z" lines; '#' comments and blank lines skipped.

    Extra trailing columns are ignored. Raises FileFormatError with the line
    number on malformed rows and on an empty cloud.
    """
    path = Path(path)
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if len(fields) < 3:
                raise FileFormatError(
                    f"{path}: line {lineno}: expected at least 3 columns, got {len(fields)}"
                )
            try:
                xyz = [float(fields[0]), float(fields[1]), float(fields[2])]
            except ValueError:
                raise FileFormatError(
                    f"{path}: line {lineno}: could not parse coordinates"
                ) from None
            if not all(math.isfinite(c) for c in xyz):
                raise FileFormatError(f"{path}: line {lineno}: non-finite coordinate")
            points.append(xyz)
    if not points:
        raise FileFormatError(f"{path}: no points found")
    return PointSet(path.stem, np.array(points, dtype=np.float64))


def load_ply_ascii(path) -> PointSet:
    """Read the vertex x/y/z columns of an ASCII PLY file.

    Other properties and elements are skipped. Binary PLY is rejected.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        if fh.readline().strip() != "ply":
            raise FileFormatError(f"{path}: missing 'ply' magic line")
        elements: list[tuple[str, int, list[str]]] = []
        saw_format = False
        for line in fh:
            fields = line.strip().split()
            if not fields or fields[0] == "comment":
                continue
            if fields[0] == "format":
                if fields[1] != "ascii":
                    raise FileFormatError(
                        f"{path}: only ASCII PLY is supported, got format '{fields[1]}'"
                    )
                saw_format = True
            elif fields[0] == "element":
                elements.append((fields[1], int(fields[2]), []))
            elif fields[0] == "property":
                if not elements:
                    raise FileFormatError(f"{path}: property before any element")
                if fields[1] == "list":
                    elements[-1][2].append("list")
                else:
                    elements[-1][2].append(fields[-1])
            elif fields[0] == "end_header":
                break
        else:
            raise FileFormatError(f"{path}: header has no end_header line")
        if not saw_format:
            raise FileFormatError(f"{path}: header has no format line")

        vertex = next((e for e in elements if e[0] == "vertex"), None)
        if vertex is None:
            raise FileFormatError(f"{path}: no vertex element")
        _, vertex_count, props = vertex
        if "list" in props:
            raise FileFormatError(f"{path}: list properties on vertices are unsupported")
        try:
            cols = [props.index(name) for name in ("x", "y", "z")]
        except ValueError:
            raise FileFormatError(f"{path}: vertex element lacks x/y/z properties") from None

        points = np.empty((vertex_count, 3))
        for name, count, _ in elements:
            if name != "vertex":
                for _ in range(count):
                    if not fh.readline():
                        raise FileFormatError(f"{path}: truncated '{name}' element")
                continue
            for row in range(count):
                line = fh.readline()
                if not line:
                    raise FileFormatError(
                        f"{path}: header declares {count} vertices, file has {row}"
                    )
                fields = line.split()
                if len(fields) < len(props):
                    raise FileFormatError(f"{path}: short vertex row {row}")
                points[row] = [float(fields[c]) for c in cols]
    if vertex_count == 0:
        raise FileFormatError(f"{path}: no points found")
    return PointSet(path.stem, points)


def stride_indices(n: int, target: int) -> np.ndarray:
    """Deterministic uniform-stride index selection.

    Returns round(j * n / count) for j = 0..count-1 with count = min(target, n),
    duplicates dropped (round is half-to-even). Indices are increasing, so the
    original order is preserved.
    """
    count = min(int(target), int(n))
    idx = np.round(np.arange(count, dtype=np.float64) * n / count).astype(np.int64)
    return np.unique(idx)


def downsample_uniform(ps: PointSet, target: int) -> PointSet:
    """Keep points at the stride_indices positions; no-op when N <= target."""
    if target < 1:
        raise ValueError("target must be >= 1")
    if len(ps) <= target:
        return ps
    return PointSet(ps.id, ps.points[stride_indices(len(ps), target)])


def load_transforms(path, expected: int | None = None) -> list[RigidTransform]:
    """Read a transform file; an absent file yields `expected` identities.

    Rejects duplicate scan indices, wrong field counts, and rotation blocks
    that violate orthonormality beyond ROTATION_FILE_TOL.
    """
    path = Path(path)
    if not path.exists():
        if expected is None:
            raise FileNotFoundError(f"{path}: transform file not found")
        return [RigidTransform.identity() for _ in range(expected)]
    rows: dict[int, RigidTransform] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split()
            if len(fields) != 13:
                raise FileFormatError(
                    f"{path}: line {lineno}: expected scan index + 12 values, got {len(fields)} fields"
                )
            try:
                idx = int(fields[0])
                values = np.array([float(f) for f in fields[1:]]).reshape(3, 4)
            except ValueError:
                raise FileFormatError(f"{path}: line {lineno}: could not parse") from None
            if idx in rows:
                raise FileFormatError(f"{path}: line {lineno}: duplicate scan index {idx}")
            rotation, translation = values[:, :3], values[:, 3]
            if (
                rotation_defect(rotation) > ROTATION_FILE_TOL
                or abs(np.linalg.det(rotation) - 1.0) > ROTATION_FILE_TOL
            ):
                raise FileFormatError(
                    f"{path}: line {lineno}: rotation block for scan {idx} is not a rotation"
                )
            rows[idx] = RigidTransform(rotation, translation)
    if not rows:
        raise FileFormatError(f"{path}: no transforms found")
    count = expected if expected is not None else max(rows) + 1
    missing = sorted(set(range(count)) - set(rows))
    extra = sorted(set(rows) - set(range(count)))
    if missing or extra:
        raise FileFormatError(
            f"{path}: scan indices do not cover 0..{count - 1} "
            f"(missing {missing}, unexpected {extra})"
        )
    return [rows[i] for i in range(count)]


def save_transforms(path, transforms) -> None:
    """Inverse of load_transforms; 17 significant digits per value."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for i, t in enumerate(transforms):
            block = np.hstack([t.rotation, t.translation[:, None]])
            fh.write(f"{i} " + " ".join(format(v, ".17g") for v in block.ravel()) + "\n")
