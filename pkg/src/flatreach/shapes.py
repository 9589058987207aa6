"""Reference shapes: analytic curves with known reach, and rasterized masks."""

from __future__ import annotations

import math

import numpy as np

from .geometry import ClosedCurve, GridMask, point_in_polygons, resample_arclength


def _arc(center, radius, a0, a1, spacing):
    n = max(int(math.ceil(abs(a1 - a0) * radius / spacing)), 1)
    t = np.linspace(a0, a1, n + 1)
    return np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])


def _segment(p, q, spacing):
    n = max(int(math.ceil(math.dist(p, q) / spacing)), 1)
    t = np.linspace(0.0, 1.0, n + 1)[:, None]
    return (1 - t) * np.asarray(p, float) + t * np.asarray(q, float)


def _join(pieces):
    # consecutive pieces share their junction point
    out = [pieces[0]] + [p[1:] for p in pieces[1:]]
    return np.vstack(out)


def circle(radius: float = 1.0, n: int = 512, center=(0.0, 0.0)) -> ClosedCurve:
    t = 2 * np.pi * np.arange(n) / n
    v = np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])
    return ClosedCurve(v, 2 * np.pi * radius / n)


def ellipse(a: float = 2.0, b: float = 1.0, n: int = 1000) -> ClosedCurve:
    """Ellipse with semi-axes a (along x) and b, resampled to uniform arc length."""
    t = 2 * np.pi * np.arange(8 * n) / (8 * n)
    dense = ClosedCurve(np.column_stack([a * np.cos(t), b * np.sin(t)]))
    return resample_arclength(dense, dense.perimeter / n)


def stadium(cap_radius: float = 1.0, side_length: float = 4.0, spacing: float = 0.01) -> ClosedCurve:
    r, h = cap_radius, side_length / 2
    pieces = [
        _segment((-h, -r), (h, -r), spacing),
        _arc((h, 0.0), r, -np.pi / 2, np.pi / 2, spacing),
        _segment((h, r), (-h, r), spacing),
        _arc((-h, 0.0), r, np.pi / 2, 3 * np.pi / 2, spacing),
    ]
    v = _join(pieces)[:-1]
    return ClosedCurve(v, spacing)


def dumbbell(
    lobe_radius: float = 1.0,
    half_gap: float = 0.2,
    spacing: float = 0.01,
    fillet_radius: float | None = None,
    neck_half_length: float | None = None,
) -> ClosedCurve:
    """Two disks joined by a straight neck of half-width ``half_gap``.

    The neck walls ``y = +-half_gap`` run over ``|x| <= neck_half_length`` and
    meet the lobes through concave fillet arcs, so the curve is C^1 with
    curvature at most ``max(1/lobe_radius, 1/fillet_radius)``. Its reach is
    ``half_gap`` whenever that is the smallest of half_gap, lobe_radius and
    fillet_radius, realized by the parallel neck walls.
    """
    R, h = lobe_radius, half_gap
    rf = fillet_radius if fillet_radius is not None else max(0.5 * R, 2.5 * h)
    xf = neck_half_length if neck_half_length is not None else 0.6 * R
    c = xf + math.sqrt((R + rf) ** 2 - (h + rf) ** 2)
    fillet = np.array([xf, h + rf])
    lobe = np.array([c, 0.0])
    u = (fillet - lobe) / np.linalg.norm(fillet - lobe)
    phi_t = math.atan2(u[1], u[0])  # lobe angle of the lobe/fillet contact
    psi_t = math.atan2(-u[1], -u[0])  # the same contact seen from the fillet centre
    upper = _join(
        [
            _arc(lobe, R, 0.0, phi_t, spacing),
            _arc(fillet, rf, psi_t, -np.pi / 2, spacing),
            _segment((xf, h), (-xf, h), spacing),
            _arc((-xf, h + rf), rf, -np.pi / 2, -np.pi - psi_t, spacing),
            _arc((-c, 0.0), R, np.pi - phi_t, np.pi, spacing),
        ]
    )
    lower = upper[::-1] * [1.0, -1.0]
    v = np.vstack([upper, lower[1:-1]])
    return ClosedCurve(v, spacing)


def star_blob(rng: np.random.Generator, mean_radius: float, center=(0.0, 0.0), n_modes: int = 5,
              amplitude: float = 0.25, n: int = 720) -> ClosedCurve:
    """Star-shaped smooth blob r(phi) = R (1 + sum_k a_k cos(k phi + phase_k))."""
    phi = 2 * np.pi * np.arange(n) / n
    k = np.arange(2, n_modes + 2)
    a = rng.uniform(-1, 1, size=k.size) * amplitude / k
    phase = rng.uniform(0, 2 * np.pi, size=k.size)
    r = mean_radius * (1 + (a[:, None] * np.cos(k[:, None] * phi + phase[:, None])).sum(axis=0))
    return ClosedCurve(np.column_stack([center[0] + r * np.cos(phi), center[1] + r * np.sin(phi)]))


def random_polygon(rng: np.random.Generator, n: int = 20, radius: float = 1.0) -> ClosedCurve:
    """Random simple star-shaped polygon (sorted angles, random radii)."""
    phi = np.sort(rng.uniform(0, 2 * np.pi, size=n))
    r = radius * rng.uniform(0.4, 1.0, size=n)
    return ClosedCurve(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


def rasterize(curves, spacing: float, shape=None, origin=None, margin: int = 2) -> GridMask:
    """Even-odd fill of closed curves, sampled at pixel centres.

    Without an explicit ``shape``/``origin`` the grid covers the curves'
    bounding box plus ``margin`` empty pixels on every side.
    """
    if isinstance(curves, ClosedCurve):
        curves = [curves]
    if origin is None or shape is None:
        allv = np.vstack([c.vertices for c in curves])
        lo = np.floor(allv.min(axis=0) / spacing) - margin
        hi = np.ceil(allv.max(axis=0) / spacing) + margin
        origin = tuple(lo * spacing)
        nx, ny = (hi - lo + 1).astype(int)
        shape = (int(ny), int(nx))
    probe = GridMask(np.zeros(shape, dtype=bool), spacing, origin)
    centers = probe.pixel_centers().reshape(-1, 2)
    inside = point_in_polygons(centers, curves).reshape(shape)
    return probe.with_cells(inside)


def disk_mask(radius_px: float, size: int = 128, spacing: float = 1.0) -> GridMask:
    """Disk of the given radius (in pixels) centred in a size x size grid."""
    c = (size - 1) / 2
    i, j = np.mgrid[0:size, 0:size]
    cells = (i - c) ** 2 + (j - c) ** 2 <= radius_px**2
    return GridMask(cells, spacing, (-c * spacing, -c * spacing))


def blob_mask(rng: np.random.Generator, size: int = 256, spacing: float = 1.0, n_blobs: int | None = None) -> GridMask:
    """Union of one to three random star-shaped blobs on a size x size grid."""
    if n_blobs is None:
        n_blobs = int(rng.integers(1, 4))
    c = (size - 1) / 2
    origin = (-c * spacing, -c * spacing)
    cells = np.zeros((size, size), dtype=bool)
    for _ in range(n_blobs):
        radius = rng.uniform(0.12, 0.3) * size * spacing
        reach = 0.45 * size * spacing - radius * 1.3
        center = rng.uniform(-reach, reach, size=2)
        blob = star_blob(rng, radius, center)
        cells |= rasterize(blob, spacing, (size, size), origin).cells
    return GridMask(cells, spacing, origin)
