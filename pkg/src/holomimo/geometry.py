"""Element layouts for one-row 2-D and 3-D arrays.

Positions are stored in units of the free-space wavelength, so every
downstream phase term uses ``k0 = 2*pi``.  Elements keep construction order
(ascending x), which fixes the row/column order of all correlation matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError

K0 = 2.0 * np.pi


class Layout(str, Enum):
    PLANAR2D = "planar2d"
    ALTERNATING3D = "alternating3d"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class ArrayGeometry:
    """Ordered element positions of an antenna array.

    Parameters
    ----------
    elements : array_like, shape (N, 3)
        Element positions in wavelengths.
    layout : Layout
        ``planar2d`` requires all z equal; ``alternating3d`` requires z to
        alternate between exactly two levels.
    """

    elements: np.ndarray
    layout: Layout = Layout.CUSTOM

    def __post_init__(self):
        pts = np.array(self.elements, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
            raise InvalidArgumentError("elements must be a non-empty (N, 3) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidArgumentError("element coordinates must be finite")
        layout = Layout(self.layout)
        z = pts[:, 2]
        if layout is Layout.PLANAR2D and np.any(z != z[0]):
            raise InvalidArgumentError("planar2d layout requires equal z-coordinates")
        if layout is Layout.ALTERNATING3D and pts.shape[0] > 1:
            even, odd = z[0::2], z[1::2]
            if np.any(even != even[0]) or np.any(odd != odd[0]):
                raise InvalidArgumentError("alternating3d layout requires two alternating z levels")
        pts.setflags(write=False)
        object.__setattr__(self, "elements", pts)
        object.__setattr__(self, "layout", layout)

    @property
    def element_count(self) -> int:
        return self.elements.shape[0]

    def __len__(self):
        return self.element_count

    def __eq__(self, other):
        if not isinstance(other, ArrayGeometry):
            return NotImplemented
        return self.layout == other.layout and np.array_equal(self.elements, other.elements)

    __hash__ = None

    @property
    def height_difference(self) -> float:
        """Vertical offset between odd and even elements (0 for planar arrays)."""
        if self.element_count < 2:
            return 0.0
        return float(self.elements[1, 2] - self.elements[0, 2])

    def aperture_length(self) -> float:
        """Extent of the array along x."""
        x = self.elements[:, 0]
        return float(x.max() - x.min())

    def min_spacing(self) -> float:
        """Smallest Euclidean distance between any two elements (inf for one element)."""
        if self.element_count < 2:
            return float("inf")
        diff = self.elements[:, None, :] - self.elements[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        return float(dist[np.triu_indices(self.element_count, 1)].min())

    def halfwave_count(self) -> int:
        """Number of elements a half-wavelength-spaced row would fit in the same length."""
        return int(np.floor(self.aperture_length() / 0.5 + 1e-9)) + 1

    def translated(self, offset: Sequence[float]) -> "ArrayGeometry":
        return ArrayGeometry(self.elements + np.asarray(offset, dtype=float), self.layout)

    def to_dict(self) -> dict:
        return {"elements": self.elements.tolist(), "layout": self.layout.value}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "ArrayGeometry":
        try:
            return cls(np.asarray(doc["elements"], dtype=float), Layout(doc.get("layout", "custom")))
        except (KeyError, TypeError) as exc:
            raise InvalidArgumentError(f"malformed geometry document: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "ArrayGeometry":
        return cls.from_dict(json.loads(text))


def build_linear_2d(n: int, spacing: float) -> ArrayGeometry:
    """One-row array along x, all elements at z = 0."""
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"element count must be a positive integer, got {n!r}")
    if not spacing > 0:
        raise InvalidArgumentError(f"spacing must be positive, got {spacing!r}")
    idx = np.arange(int(n), dtype=float)
    pts = np.zeros((int(n), 3))
    pts[:, 0] = idx * spacing
    return ArrayGeometry(pts, Layout.PLANAR2D)


def build_linear_3d(n: int, spacing: float, h: float) -> ArrayGeometry:
    """One-row array along x with odd-indexed elements raised by ``h``.

    Upper elements sit directly above the x-grid (no lateral offset).  With
    ``h == 0`` the result is identical to :func:`build_linear_2d`.
    """
    if not h >= 0:
        raise InvalidArgumentError(f"height difference must be non-negative, got {h!r}")
    base = build_linear_2d(n, spacing)
    if h == 0:
        return base
    pts = base.elements.copy()
    pts[1::2, 2] = h
    return ArrayGeometry(pts, Layout.ALTERNATING3D)


def projected_length(geometry: ArrayGeometry, direction: Sequence[float]) -> float:
    """Extent of the array seen from ``direction``.

    Elements are projected onto the plane orthogonal to ``direction``; the
    result is max minus min of the projected coordinates along the in-plane
    principal axis of the projected point set.
    """
    d = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(d)
    if norm == 0 or not np.isfinite(norm):
        raise InvalidArgumentError("direction must be a non-zero finite vector")
    if abs(norm - 1.0) > 1e-9:
        raise InvalidArgumentError(f"direction must be normalized, |d| = {norm}")
    pts = geometry.elements
    proj = pts - np.outer(pts @ d, d)
    centered = proj - proj.mean(axis=0)
    if not np.any(np.abs(centered) > 1e-15):
        return 0.0
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    coords = centered @ vt[0]
    return float(coords.max() - coords.min())
