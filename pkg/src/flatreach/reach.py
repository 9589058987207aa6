"""Reach of closed planar curves.

Three independent estimators are provided:

* :func:`reach_federer` -- minimum of Federer's pair quotient
  ``|y - x|^2 / (2 dist(y - x, Tan_x))`` capped by ``1 / max curvature``;
* :func:`reach_bruteforce` -- direct search for ambient points with a
  non-unique nearest point (the definition of reach, used as the oracle);
* :func:`injectivity_radius` -- largest offset for which both normal maps
  stay injective.

All accept a single :class:`ClosedCurve`; the first two also accept a sequence
of curves and then measure the reach of their union.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .exceptions import DomainError, FocalOnly, ParameterError, ResolutionError
from .geometry import (
    ClosedCurve,
    Point,
    estimate_curvature,
    offset_curve,
    outward_normals,
    tangents,
)

# pairs closer than this many vertex spacings (along one curve) are neighbours
SEPARATION_SPACINGS = 5.0
# a minimizing pair is a genuine bottleneck when its endpoints' curvature
# stays below this fraction of 1/reach
BOTTLENECK_CURVATURE_RATIO = 0.9
BOTTLENECK_RTOL = 0.02


@dataclass(frozen=True)
class ReachEstimate:
    value: float
    method: str
    kind: str
    witness: tuple[Point, Point] | None = None


@dataclass(frozen=True)
class DoubleNormalPair:
    p: Point
    q: Point
    midpoint: Point
    tangent_angle_gap: float


def _as_curves(curves) -> list[ClosedCurve]:
    if isinstance(curves, ClosedCurve):
        return [curves]
    curves = list(curves)
    if not curves:
        raise DomainError("no curves given")
    return curves


def _pair_quotient_chunks(curves: Sequence[ClosedCurve], min_separation: float | None, rows: int = 512):
    """Yield ``(row_offset, q)`` blocks of the Federer quotient matrix.

    ``q[i, j]`` is the quotient for base vertex ``i`` (tangent line at x) and
    vertex ``j`` of the union; excluded pairs hold ``inf``.
    """
    verts = np.vstack([c.vertices for c in curves])
    norms = np.vstack([outward_normals(c) for c in curves])
    comp = np.concatenate([np.full(len(c), k) for k, c in enumerate(curves)])
    arc = np.concatenate([c.arclength for c in curves])
    perim = np.array([c.perimeter for c in curves])[comp]
    sep = np.array(
        [SEPARATION_SPACINGS * c.mean_spacing if min_separation is None else min_separation for c in curves]
    )[comp]
    for r0 in range(0, len(verts), rows):
        r = slice(r0, r0 + rows)
        diff = verts[None, :, :] - verts[r, None, :]
        sq = np.einsum("ijk,ijk->ij", diff, diff)
        dperp = np.abs(np.einsum("ijk,ik->ij", diff, norms[r]))
        ds = np.abs(arc[None, :] - arc[r, None])
        cyc = np.minimum(ds, perim[r, None] - ds)
        same = comp[r, None] == comp[None, :]
        excluded = (same & (cyc < sep[r, None])) | (dperp < 1e-12)
        q = np.full(sq.shape, np.inf)
        np.divide(sq, 2.0 * dperp, out=q, where=~excluded)
        yield r0, q


def reach_federer(curves, window: float | None = None, min_separation: float | None = None) -> ReachEstimate:
    """Federer-quotient reach estimate, capped by the inverse maximum curvature.

    Parameters
    ----------
    curves : ClosedCurve or sequence of ClosedCurve
        Uniformly sampled, simple curve(s); a sequence is treated as a union.
    window : float, optional
        Curvature window passed to :func:`estimate_curvature`.
    min_separation : float, optional
        Arc-length separation below which same-curve pairs are ignored;
        defaults to 5 mean vertex spacings.

    Returns
    -------
    ReachEstimate
        ``kind='bottleneck'`` when some near-minimal pair has endpoint
        curvature clearly below ``1/reach`` (the pair is then the witness),
        otherwise ``kind='focal'`` with the most curved vertex and its centre
        of curvature as witness.
    """
    curves = _as_curves(curves)
    if any(len(c) < 8 for c in curves):
        raise ResolutionError("reach estimation needs at least 8 vertices per curve")
    verts = np.vstack([c.vertices for c in curves])
    kappa = np.concatenate([estimate_curvature(c, window) for c in curves])
    kmax = float(kappa.max())
    focal = math.inf if kmax == 0 else 1.0 / kmax
    qmin = min(float(q.min()) for _, q in _pair_quotient_chunks(curves, min_separation))
    value = min(qmin, focal)

    if math.isfinite(value):
        flat = kappa * value < BOTTLENECK_CURVATURE_RATIO
        best, pair = math.inf, None
        for r0, q in _pair_quotient_chunks(curves, min_separation):
            ok = (q <= value * (1 + BOTTLENECK_RTOL)) & flat[r0 : r0 + len(q), None] & flat[None, :]
            if ok.any():
                masked = np.where(ok, q, np.inf)
                i, j = np.unravel_index(int(np.argmin(masked)), q.shape)
                if masked[i, j] < best:
                    best, pair = masked[i, j], (r0 + i, j)
        if pair is not None:
            i, j = pair
            return ReachEstimate(value, "federer", "bottleneck", (Point(*verts[i]), Point(*verts[j])))

    if kmax == 0:
        return ReachEstimate(value, "federer", "focal", None)
    i = int(np.argmax(kappa))
    starts = np.cumsum([0] + [len(c) for c in curves])
    k = int(np.searchsorted(starts, i, side="right")) - 1
    v, local = curves[k].vertices, i - starts[k]
    m = v[local]
    towards = (v[(local - 1) % len(v)] + v[(local + 1) % len(v)]) / 2 - m
    centre = m + towards / np.linalg.norm(towards) * focal
    return ReachEstimate(value, "federer", "focal", (Point(*m), Point(*centre)))


def reach_bruteforce(
    curves,
    grid_step: float,
    tie_tol: float | None = None,
    max_distance: float | None = None,
) -> ReachEstimate:
    """Reach straight from its definition, by exhaustive nearest-point queries.

    A curve point m keeps m as its nearest point along its normal ray
    ``m + t n`` only up to the cut distance, where another part of the curve
    becomes (at least) as close; ambient points beyond the cut have a
    different nearest point, and the cut point itself has two. The reach is
    the smallest cut distance. Rays are cast from every edge midpoint on both
    sides; each ambient sample's distance to the whole curve set is computed
    exhaustively, and the cut is bracketed by bisection to width
    ``grid_step``.

    Parameters
    ----------
    curves : ClosedCurve or sequence of ClosedCurve
    grid_step : float
        Resolution of the ambient sampling along each ray.
    tie_tol : float, optional
        m counts as a nearest point of x while ``dist(x) >= |x - m| - tie_tol``;
        defaults to 1e-9 of the bounding-box diagonal (round-off only).
    max_distance : float, optional
        Rays are not followed further than this (default: half the
        bounding-box diagonal); an uncut set yields an infinite estimate.
    """
    curves = _as_curves(curves)
    if not grid_step > 0:
        raise ParameterError("grid_step must be positive")
    verts = np.vstack([c.vertices for c in curves])
    extent = float(np.hypot(*np.ptp(verts, axis=0)))
    if tie_tol is None:
        tie_tol = 1e-9 * extent
    if not tie_tol > 0:
        raise ParameterError("tie_tol must be positive")
    if max_distance is None:
        max_distance = 0.5 * extent
    a = np.ascontiguousarray(verts)
    b = np.ascontiguousarray(np.vstack([np.roll(c.vertices, -1, axis=0) for c in curves]))
    cut, k, side = _kernels.normal_cuts(a, b, float(max_distance), float(grid_step), float(tie_tol))
    if k < 0:
        return ReachEstimate(math.inf, "bruteforce", "focal", None)

    e = b[k] - a[k]
    n = side * np.array([e[1], -e[0]]) / math.hypot(*e)
    f1 = a[k] + 0.5 * e
    # the foot that takes over just past the cut
    beyond = f1 + (cut + grid_step) * n
    seg_t = np.clip(np.einsum("ij,ij->i", beyond - a, b - a) / np.einsum("ij,ij->i", b - a, b - a), 0, 1)
    feet = a + seg_t[:, None] * (b - a)
    f2 = feet[int(np.argmin(np.hypot(*(feet - beyond).T)))]

    # classify by the curvature at the two feet, as for the Federer estimate
    kappa = np.concatenate([estimate_curvature(c) for c in curves])
    k1 = kappa[int(np.argmin(np.hypot(*(verts - f1).T)))]
    k2 = kappa[int(np.argmin(np.hypot(*(verts - f2).T)))]
    kind = "bottleneck" if max(k1, k2) * cut < BOTTLENECK_CURVATURE_RATIO else "focal"
    return ReachEstimate(float(cut), "bruteforce", kind, (Point(*f1), Point(*f2)))


def double_normal_pair(curve) -> DoubleNormalPair:
    """The reach-realizing bottleneck pair and the angle between its tangent lines.

    Raises
    ------
    FocalOnly
        If the reach is realized by curvature rather than a bottleneck.
    """
    curves = _as_curves(curve)
    est = reach_federer(curves)
    if est.kind != "bottleneck":
        raise FocalOnly(f"reach {est.value:.6g} is curvature-limited; no bottleneck pair")
    p, q = (np.asarray(w) for w in est.witness)
    verts = np.vstack([c.vertices for c in curves])
    tans = np.vstack([tangents(c) for c in curves])
    tp = tans[int(np.argmin(np.hypot(*(verts - p).T)))]
    tq = tans[int(np.argmin(np.hypot(*(verts - q).T)))]
    gap = math.acos(min(1.0, abs(float(np.dot(tp, tq)))))
    mid = (p + q) / 2
    return DoubleNormalPair(Point(*p), Point(*q), Point(*mid), gap)


def _both_sides_injective(curve: ClosedCurve, eps: float) -> bool:
    return offset_curve(curve, eps, "outer").injective and offset_curve(curve, eps, "inner").injective


def injectivity_radius(curve: ClosedCurve, eps_hi: float | None = None, tol: float | None = None) -> float:
    """Supremal offset for which both normal maps are injective, by bisection.

    ``tol`` defaults to 1e-3 of the bounding-box diagonal and ``eps_hi`` to the
    diagonal itself. If both offsets are still injective at ``eps_hi``, that
    value is returned.
    """
    if tol is None:
        tol = 1e-3 * curve.extent
    if eps_hi is None:
        eps_hi = curve.extent
    if not eps_hi > tol > 0:
        raise ParameterError("need eps_hi > tol > 0")
    if not curve.is_simple():
        raise DomainError("injectivity radius requires a simple curve")
    if _both_sides_injective(curve, eps_hi):
        return float(eps_hi)
    lo, hi = 0.0, float(eps_hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _both_sides_injective(curve, mid):
            lo = mid
        else:
            hi = mid
    return lo
