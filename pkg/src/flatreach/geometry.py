"""Planar curve and mask primitives.

Curves are closed polylines stored as ``(N, 2)`` float arrays; the edge from
the last vertex back to the first is implicit. Masks are boolean pixel grids
whose pixel ``(i, j)`` is centred at ``origin + (j, i) * spacing``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .exceptions import DomainError, ParameterError

COLLINEAR_EPS = 1e-12


class Point(NamedTuple):
    x: float
    y: float


def signed_area(vertices) -> float:
    """Shoelace area of a closed polygon; positive when counterclockwise."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


@dataclass(frozen=True, eq=False)
class ClosedCurve:
    """Oriented closed polyline.

    A trailing vertex equal to the first is dropped, as are repeated
    consecutive vertices. Orientation follows the sign of the enclosed area.
    """

    vertices: np.ndarray
    spacing_hint: float | None = None

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise DomainError(f"vertices must have shape (N, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("vertices must be finite")
        if len(v):
            keep = np.any(v != np.roll(v, -1, axis=0), axis=1)
            v = v[keep]
        if len(v) < 3:
            raise DomainError("a closed curve needs at least 3 distinct vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def __len__(self):
        return len(self.vertices)

    @property
    def signed_area(self) -> float:
        return signed_area(self.vertices)

    @property
    def orientation(self) -> str:
        return "counterclockwise" if self.signed_area > 0 else "clockwise"

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self.vertices, -1, axis=0) - self.vertices

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.hypot(*self.edges.T)

    @property
    def perimeter(self) -> float:
        return float(self.segment_lengths.sum())

    @property
    def arclength(self) -> np.ndarray:
        """Arc-length position of each vertex, starting at 0."""
        return np.concatenate([[0.0], np.cumsum(self.segment_lengths)[:-1]])

    @property
    def mean_spacing(self) -> float:
        return self.perimeter / len(self)

    @property
    def extent(self) -> float:
        """Diagonal of the bounding box."""
        return float(np.hypot(*np.ptp(self.vertices, axis=0)))

    def reversed(self) -> ClosedCurve:
        return ClosedCurve(self.vertices[::-1], self.spacing_hint)

    def scaled(self, factor: float) -> ClosedCurve:
        hint = None if self.spacing_hint is None else self.spacing_hint * factor
        return ClosedCurve(self.vertices * factor, hint)

    def translated(self, dx: float, dy: float) -> ClosedCurve:
        return ClosedCurve(self.vertices + [dx, dy], self.spacing_hint)

    def is_simple(self) -> bool:
        return self_intersection(self) is None


@dataclass(frozen=True)
class OffsetResult:
    curve: ClosedCurve
    epsilon: float
    side: str
    injective: bool


@dataclass(frozen=True, eq=False)
class GridMask:
    """Binary region on a uniform pixel grid (``cells[i, j]`` true inside)."""

    cells: np.ndarray
    spacing: float = 1.0
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        c = np.array(self.cells, dtype=bool)
        if c.ndim != 2 or c.size == 0:
            raise DomainError("cells must be a non-empty 2-D array")
        if not self.spacing > 0:
            raise DomainError("spacing must be positive")
        c.setflags(write=False)
        object.__setattr__(self, "cells", c)
        object.__setattr__(self, "spacing", float(self.spacing))
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def area(self) -> float:
        return float(self.cells.sum()) * self.spacing**2

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, ymin, xmax, ymax) of the pixel footprint."""
        h = self.spacing
        x0, y0 = self.origin
        return (x0 - h / 2, y0 - h / 2, x0 + (self.width - 0.5) * h, y0 + (self.height - 0.5) * h)

    def same_grid(self, other: GridMask) -> bool:
        return (
            self.cells.shape == other.cells.shape
            and self.spacing == other.spacing
            and self.origin == other.origin
        )

    def with_cells(self, cells) -> GridMask:
        return GridMask(cells, self.spacing, self.origin)

    def margin(self) -> int:
        """Width of the all-false frame around the region."""
        rows = np.flatnonzero(self.cells.any(axis=1))
        if rows.size == 0:
            return min(self.cells.shape) // 2
        cols = np.flatnonzero(self.cells.any(axis=0))
        return int(min(rows[0], cols[0], self.height - 1 - rows[-1], self.width - 1 - cols[-1]))

    def ensure_margin(self, margin: int = 2) -> GridMask:
        """Pad with false cells so that at least ``margin`` of them frame the region."""
        need = margin - self.margin()
        if need <= 0:
            return self
        h = self.spacing
        return GridMask(
            np.pad(self.cells, need),
            h,
            (self.origin[0] - need * h, self.origin[1] - need * h),
        )

    def pixel_centers(self) -> np.ndarray:
        """(height, width, 2) array of pixel-centre coordinates."""
        h = self.spacing
        xs = self.origin[0] + h * np.arange(self.width)
        ys = self.origin[1] + h * np.arange(self.height)
        X, Y = np.meshgrid(xs, ys)
        return np.stack([X, Y], axis=-1)

    def equals(self, other: GridMask) -> bool:
        return self.same_grid(other) and bool(np.array_equal(self.cells, other.cells))


# ---------------------------------------------------------------------------
# predicates and distances


def self_intersection(curve: ClosedCurve):
    """First pair of crossing non-adjacent edges ``(i, j)``, or None if simple."""
    v = np.ascontiguousarray(curve.vertices)
    eps = COLLINEAR_EPS * max(curve.extent, 1e-300) ** 2
    i, j = _kernels.first_self_intersection(v, eps)
    return None if i < 0 else (int(i), int(j))


def point_in_polygons(points, polygons: Sequence) -> np.ndarray:
    """Even-odd (ray casting) membership of points in a union of closed polylines."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    px, py = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    for poly in polygons:
        v = poly.vertices if isinstance(poly, ClosedCurve) else np.asarray(poly, dtype=float)
        a = v
        b = np.roll(v, -1, axis=0)
        for (ax, ay), (bx, by) in zip(a, b):
            if ay == by:
                continue
            straddle = (ay > py) != (by > py)
            xcross = ax + (py - ay) * (bx - ax) / (by - ay)
            inside ^= straddle & (px < xcross)
    return inside


def distance_to_curves(points, curves: Sequence[ClosedCurve]) -> np.ndarray:
    """Unsigned distance from each point to the union of curve polylines."""
    pts = np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))
    a = np.concatenate([c.vertices for c in curves])
    b = np.concatenate([np.roll(c.vertices, -1, axis=0) for c in curves])
    return _kernels.nearest_distances(pts, np.ascontiguousarray(a), np.ascontiguousarray(b))


def signed_distance(mask: GridMask, p) -> float:
    """Signed distance to the boundary of a mask region (positive inside).

    The boundary is the marching-squares polyline of the mask (no smoothing);
    the sign comes from even-odd ray casting against that polyline, so
    sub-pixel queries are consistent with the distance.
    """
    from .flatnorm import extract_boundary

    x, y = float(p[0]), float(p[1])
    xmin, ymin, xmax, ymax = mask.bounds
    if not (xmin <= x <= xmax and ymin <= y <= ymax):
        raise DomainError(f"point ({x}, {y}) lies outside the grid bounds")
    curves = extract_boundary(mask.ensure_margin(1), smoothing_passes=0)
    if not curves:
        raise DomainError("mask has no boundary")
    d = float(distance_to_curves([[x, y]], curves)[0])
    return d if point_in_polygons([[x, y]], curves)[0] else -d


# ---------------------------------------------------------------------------
# differential quantities


def tangents(curve: ClosedCurve) -> np.ndarray:
    """Unit tangents at every vertex by central differences."""
    v = curve.vertices
    d = np.roll(v, -1, axis=0) - np.roll(v, 1, axis=0)
    return d / np.hypot(*d.T)[:, None]


def estimate_tangent(curve: ClosedCurve, i: int) -> np.ndarray:
    """Unit tangent at vertex ``i`` (central difference of its neighbours)."""
    n = len(curve)
    if not -n <= i < n:
        raise IndexError(f"vertex index {i} out of range for {n} vertices")
    v = curve.vertices
    d = v[(i + 1) % n] - v[(i - 1) % n]
    return d / math.hypot(*d)


def outward_normals(curve: ClosedCurve) -> np.ndarray:
    """Unit normals pointing away from the region the curve encloses."""
    t = tangents(curve)
    right = np.column_stack([t[:, 1], -t[:, 0]])
    return right if curve.signed_area > 0 else -right


def offset_curve(curve: ClosedCurve, eps: float, side: str = "outer") -> OffsetResult:
    """Displace every vertex by ``eps`` along its outer or inner unit normal.

    The offset counts as injective when it has no self-intersection and no
    edge reverses direction relative to the original (a fold where the
    offset distance exceeds the local radius of curvature).
    """
    if not eps > 0:
        raise DomainError("offset distance must be positive")
    if side not in ("outer", "inner"):
        raise ParameterError(f"side must be 'outer' or 'inner', got {side!r}")
    sign = 1.0 if side == "outer" else -1.0
    moved = curve.vertices + sign * eps * outward_normals(curve)
    new_edges = np.roll(moved, -1, axis=0) - moved
    folded = bool(np.any(np.einsum("ij,ij->i", new_edges, curve.edges) <= 0))
    try:
        out = ClosedCurve(moved, curve.spacing_hint)
    except DomainError:
        # offset collapsed onto fewer than three points
        return OffsetResult(ClosedCurve(curve.vertices, curve.spacing_hint), eps, side, False)
    injective = not folded and out.is_simple()
    return OffsetResult(out, float(eps), side, injective)


def menger_curvature(p, q, r) -> np.ndarray:
    """Inverse circumradius of triangles (p, q, r); 0 for collinear triples."""
    p, q, r = (np.asarray(a, dtype=float) for a in (p, q, r))
    cross = (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (
        r[..., 0] - p[..., 0]
    )
    a = np.linalg.norm(q - p, axis=-1)
    b = np.linalg.norm(r - q, axis=-1)
    c = np.linalg.norm(p - r, axis=-1)
    den = a * b * c
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(den > 0, 2.0 * np.abs(cross) / np.where(den > 0, den, 1.0), 0.0)
    scale = np.maximum(np.maximum(a, b), c)
    return np.where(np.abs(cross) <= COLLINEAR_EPS * scale**2, 0.0, k)


def point_at_arclength(curve: ClosedCurve, s) -> np.ndarray:
    """Interpolate positions at (cyclic) arc-length values ``s``."""
    v = curve.vertices
    closed = np.vstack([v, v[:1]])
    knots = np.concatenate([[0.0], np.cumsum(curve.segment_lengths)])
    s = np.mod(np.asarray(s, dtype=float), knots[-1])
    return np.column_stack([np.interp(s, knots, closed[:, 0]), np.interp(s, knots, closed[:, 1])])


def estimate_curvature(curve: ClosedCurve, window: float | None = None) -> np.ndarray:
    """Unsigned Menger curvature at each vertex.

    Parameters
    ----------
    curve : ClosedCurve
    window : float, optional
        Arc-length span of the triple; the outer points sit at +-window/2
        from the vertex. Defaults to 6 times the mean vertex spacing.

    Returns
    -------
    numpy.ndarray
        One nonnegative curvature per vertex.
    """
    h = curve.mean_spacing
    if window is None:
        window = 6.0 * h
    if window < 2.0 * h * (1 - 1e-9):
        raise ParameterError(f"window {window} is below twice the mean vertex spacing {h}")
    s = curve.arclength
    before = point_at_arclength(curve, s - window / 2)
    after = point_at_arclength(curve, s + window / 2)
    return menger_curvature(before, curve.vertices, after)


def resample_arclength(curve: ClosedCurve, step: float) -> ClosedCurve:
    """Vertices equally spaced in arc length, starting at the first vertex."""
    length = curve.perimeter
    if not length > 0:
        raise DomainError("curve has zero perimeter")
    if not 0 < step < length / 8:
        raise ParameterError(f"step must lie in (0, perimeter/8) = (0, {length / 8})")
    n = max(int(round(length / step)), 8)
    s = np.arange(n) * (length / n)
    return ClosedCurve(point_at_arclength(curve, s), length / n)


def smooth_closed(vertices, passes: int) -> np.ndarray:
    """Cyclic 3-point moving average applied ``passes`` times."""
    v = np.asarray(vertices, dtype=float)
    for _ in range(passes):
        v = (np.roll(v, 1, axis=0) + v + np.roll(v, -1, axis=0)) / 3.0
    return v
