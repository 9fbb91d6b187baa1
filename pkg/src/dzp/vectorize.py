"""Zigzag persistence images (ZPIs).

A diagram is mapped to (birth, persistence) coordinates, each point becomes an
isotropic Gaussian weighted by its normalized persistence, and every pixel
holds the exact integral of that surface over its cell. Row 0 of ``pixels`` is
the lowest persistence band and column 0 the earliest birth.
"""
from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import ValidationError
from .zigzag import PersistenceDiagram

DEFAULT_SIZE = 50
Bounds = tuple[float, float, float, float]


@dataclass(frozen=True, eq=False)
class PersistenceImage:
    pixels: np.ndarray
    bounds: Bounds
    theta: float
    dim: int = 0
    points: tuple[tuple[float, float], ...] = ()
    weight_scale: float = 0.0

    @property
    def size(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class DeltaImage:
    """Signed pixelwise difference ``later - earlier``."""

    pixels: np.ndarray
    bounds: Bounds
    dim: int = 0


def transform_diagram(d: PersistenceDiagram, dim: int) -> list[tuple[float, float]]:
    """(birth, death) -> (birth, death - birth) for one homology dimension."""
    return [(iv.birth, iv.death - iv.birth) for iv in d.of_dim(dim)]


def _diag(b: Bounds) -> float:
    return math.hypot(b[1] - b[0], b[3] - b[2])


def data_box(points: Sequence[tuple[float, float]]) -> Bounds:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), max(xs), min(ys), max(ys))


def default_theta(reference: Bounds) -> float:
    """One tenth of the box diagonal; 0.1 for a degenerate box."""
    d = _diag(reference)
    return 0.1 * (d if d > 0 else 1.0)


def resolve_bounds(
    points: Sequence[tuple[float, float]], bounds: str | Bounds = "auto", theta: float | None = None
) -> tuple[Bounds, float]:
    """Pick the render window and bandwidth.

    ``auto`` takes the data bounding box grown by ``3 * theta`` on each side; an
    empty point set gets the unit box.
    """
    if isinstance(bounds, str):
        if bounds != "auto":
            raise ValidationError(f"bounds must be 'auto' or (x_min, x_max, y_min, y_max), got {bounds!r}")
        if not points:
            box = (0.0, 1.0, 0.0, 1.0)
            return box, default_theta(box) if theta is None else float(theta)
        box = data_box(points)
        th = default_theta(box) if theta is None else float(theta)
        if th <= 0:
            raise ValidationError(f"theta must be positive, got {th}")
        m = 3.0 * th
        return (box[0] - m, box[1] + m, box[2] - m, box[3] + m), th
    box = tuple(float(v) for v in bounds)
    if len(box) != 4 or not (box[0] < box[1] and box[2] < box[3]):
        raise ValidationError(f"bounds must satisfy x_min < x_max and y_min < y_max, got {bounds!r}")
    return box, default_theta(box) if theta is None else float(theta)


def _cell_mass(edges: np.ndarray, centers: np.ndarray, theta: float) -> np.ndarray:
    """Gaussian mass of each 1-D cell, shape (n_points, n_cells)."""
    cdf = ndtr((edges[None, :] - centers[:, None]) / theta)
    return np.diff(cdf, axis=1)


def render_zpi(
    points: Iterable[tuple[float, float]],
    size: int = DEFAULT_SIZE,
    theta: float | None = None,
    bounds: str | Bounds = "auto",
    dim: int = 0,
    weight_scale: float | None = None,
) -> PersistenceImage:
    """Integrate the weighted Gaussian surface of ``points`` over a size x size grid.

    Each point weighs ``persistence / weight_scale``; ``weight_scale`` defaults
    to the largest persistence present (all weights zero if that is zero).
    """
    pts = tuple((float(x), float(y)) for x, y in points)
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise ValidationError(f"size must be a positive integer, got {size!r}")
    if theta is not None and not theta > 0:
        raise ValidationError(f"theta must be positive, got {theta}")
    box, th = resolve_bounds(pts, bounds, theta)
    if not pts:
        return PersistenceImage(np.zeros((size, size)), box, th, dim, pts, 0.0)

    arr = np.asarray(pts)
    scale = float(arr[:, 1].max()) if weight_scale is None else float(weight_scale)
    if scale > 0:
        g = arr[:, 1] / scale
    else:
        g = np.zeros(len(pts))
    if np.any(g < 0):
        raise ValidationError("negative persistence in diagram")

    xe = np.linspace(box[0], box[1], size + 1)
    ye = np.linspace(box[2], box[3], size + 1)
    ax = _cell_mass(xe, arr[:, 0], th)
    ay = _cell_mass(ye, arr[:, 1], th)
    pixels = (ay * g[:, None]).T @ ax
    np.maximum(pixels, 0.0, out=pixels)
    return PersistenceImage(pixels, box, th, dim, pts, scale)


def rerender(img: PersistenceImage, bounds: Bounds) -> PersistenceImage:
    return render_zpi(img.points, img.size, img.theta, bounds, img.dim, img.weight_scale)


def union_bounds(*boxes: Bounds) -> Bounds:
    return (
        min(b[0] for b in boxes),
        max(b[1] for b in boxes),
        min(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def delta_zpi(a: PersistenceImage, b: PersistenceImage) -> DeltaImage:
    """``b - a``; both are re-rendered on a common box first if theirs differ."""
    if a.pixels.shape != b.pixels.shape:
        raise ValidationError(f"image sizes differ: {a.pixels.shape} vs {b.pixels.shape}")
    if a.bounds != b.bounds:
        box = union_bounds(a.bounds, b.bounds)
        a, b = rerender(a, box), rerender(b, box)
    return DeltaImage(b.pixels - a.pixels, b.bounds, b.dim)
