import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatreach.exceptions import DomainError, ParameterError
from flatreach.geometry import (
    ClosedCurve,
    GridMask,
    estimate_curvature,
    estimate_tangent,
    offset_curve,
    point_in_polygons,
    resample_arclength,
    self_intersection,
    signed_area,
    signed_distance,
)
from flatreach.shapes import circle, dumbbell, ellipse, random_polygon, rasterize, stadium

SQUARE = np.array([[0, 0], [4, 0], [4, 4], [0, 4]], float)


def _crosses_naive(p, q, r, s):
    # textbook proper/collinear segment test, pure python
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) < 1e-12 else (1 if v > 0 else -1)

    def on(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    o1, o2, o3, o4 = orient(p, q, r), orient(p, q, s), orient(r, s, p), orient(r, s, q)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return (o1 == 0 and on(p, q, r)) or (o2 == 0 and on(p, q, s)) or (o3 == 0 and on(r, s, p)) or (
        o4 == 0 and on(r, s, q)
    )


def naive_simple(v):
    n = len(v)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _crosses_naive(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                return False
    return True


# ---------------------------------------------------------------- ClosedCurve


def test_curve_drops_closing_duplicate_and_repeats():
    c = ClosedCurve([[0, 0], [1, 0], [1, 0], [1, 1], [0, 0]])
    assert len(c) == 3


def test_curve_needs_three_vertices():
    with pytest.raises(DomainError):
        ClosedCurve([[0, 0], [1, 1]])


def test_orientation_and_reversal():
    c = ClosedCurve(SQUARE)
    assert c.orientation == "counterclockwise"
    assert c.signed_area == pytest.approx(16.0)
    assert c.reversed().signed_area == pytest.approx(-16.0)
    assert c.reversed().orientation == "clockwise"


def test_vertices_are_read_only():
    c = ClosedCurve(SQUARE)
    with pytest.raises(ValueError):
        c.vertices[0, 0] = 5.0


def test_self_intersection_bowtie():
    bow = ClosedCurve([[0, 0], [2, 2], [2, 0], [0, 2]])
    assert self_intersection(bow) is not None
    assert ClosedCurve(SQUARE).is_simple()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(4, 14))
def test_self_intersection_matches_naive(seed, n):
    rng = np.random.default_rng(seed)
    v = rng.uniform(-1, 1, size=(n, 2))
    c = ClosedCurve(v)
    assert c.is_simple() == naive_simple(c.vertices)


def test_point_in_polygons_even_odd():
    outer = ClosedCurve(SQUARE)
    hole = ClosedCurve(SQUARE * 0.5 + 1)
    pts = [[0.5, 0.5], [2, 2], [5, 5]]
    assert list(point_in_polygons(pts, [outer, hole])) == [True, False, False]


# ---------------------------------------------------------------- signed distance


@pytest.fixture(scope="module")
def unit_disk():
    return rasterize(circle(1.0, 2000), 0.02)


@pytest.mark.parametrize("p, expected", [((0, 0), 1.0), ((0.5, 0), 0.5)])
def test_signed_distance_inside(unit_disk, p, expected):
    assert signed_distance(unit_disk, p) == pytest.approx(expected, abs=unit_disk.spacing)


def test_signed_distance_outside():
    m = rasterize(circle(1.0, 2000), 0.02, shape=(160, 160), origin=(-1.59, -1.59))
    assert signed_distance(m, (1.5, 0.0)) == pytest.approx(-0.5, abs=0.02)
    m2 = rasterize(circle(1.0, 2000), 0.05, shape=(70, 70), origin=(-1.2, -1.2))
    assert signed_distance(m2, (2.0, 0.0)) == pytest.approx(-1.0, abs=0.05)


def test_signed_distance_out_of_bounds(unit_disk):
    with pytest.raises(DomainError):
        signed_distance(unit_disk, (10.0, 0.0))


def test_signed_distance_lipschitz(unit_disk):
    xs = np.linspace(-1.0, 1.0, 41)
    vals = [signed_distance(unit_disk, (x, 0.3)) for x in xs]
    step = xs[1] - xs[0]
    assert np.all(np.abs(np.diff(vals)) <= step + 2 * unit_disk.spacing)


# ---------------------------------------------------------------- GridMask


def test_ensure_margin_pads_and_shifts_origin():
    m = GridMask(np.ones((3, 3), bool), 0.5, (1.0, 1.0))
    p = m.ensure_margin(2)
    assert p.cells.shape == (7, 7)
    assert p.origin == (0.0, 0.0)
    assert p.margin() == 2
    assert p.area == m.area


def test_gridmask_rejects_bad_spacing():
    with pytest.raises(DomainError):
        GridMask(np.ones((2, 2), bool), 0.0)


# ---------------------------------------------------------------- offsets


def test_outer_offset_of_circle():
    res = offset_curve(circle(1.0, 512), 0.5, "outer")
    assert res.injective
    assert res.curve.perimeter == pytest.approx(3 * math.pi, rel=1e-3)


def test_inner_offset_of_circle():
    res = offset_curve(circle(1.0, 512), 0.5, "inner")
    assert res.injective
    r = np.hypot(*res.curve.vertices.T)
    assert np.allclose(r, 0.5)


def test_inner_offset_past_center_not_injective():
    assert not offset_curve(circle(1.0, 512), 1.2, "inner").injective


def test_dumbbell_offset_into_neck():
    # the neck is interior, so the inner offset runs into the gap
    c = dumbbell(1.0, 0.1, 0.05)
    res = offset_curve(c, 0.15, "inner")
    assert not res.injective
    assert not naive_simple(res.curve.vertices)
    ok = offset_curve(c, 0.09, "inner")
    assert ok.injective and naive_simple(ok.curve.vertices)


def test_offset_rejects_nonpositive():
    with pytest.raises(DomainError):
        offset_curve(circle(), 0.0)


def test_offset_curvature_of_circle():
    r, eps = 1.0, 0.4
    res = offset_curve(circle(r, 1000), eps, "inner")
    k = estimate_curvature(res.curve)
    assert np.allclose(k, 1 / (r - eps), rtol=0.02)


def test_offset_tangent_alignment():
    c = ellipse(2.0, 1.0, 2000)  # max curvature 2, step ~ 0.005 <= 0.01/K
    kmax = estimate_curvature(c).max()
    for side in ("outer", "inner"):
        off = offset_curve(c, 0.4 / kmax, side).curve
        for i in range(0, len(c), 37):
            t0, t1 = estimate_tangent(c, i), estimate_tangent(off, i)
            ang = math.degrees(math.acos(min(1.0, abs(float(t0 @ t1)))))
            assert ang < 2.0


# ---------------------------------------------------------------- tangents


def test_tangent_circle():
    c = circle(1.0, 512)
    i = int(np.argmin(np.hypot(*(c.vertices - [1, 0]).T)))
    assert np.allclose(estimate_tangent(c, i), [0, 1], atol=1e-2)


def test_tangent_square_midside():
    c = resample_arclength(ClosedCurve(SQUARE), 1.0)
    i = int(np.argmin(np.hypot(*(c.vertices - [2, 0]).T)))
    assert np.array_equal(estimate_tangent(c, i), [1.0, 0.0])


def test_tangent_ellipse():
    c = ellipse(2.0, 1.0, 1000)
    i = int(np.argmin(np.hypot(*(c.vertices - [0, 1]).T)))
    assert np.allclose(estimate_tangent(c, i), [-1, 0], atol=1e-2)


def test_tangent_bad_index():
    with pytest.raises(IndexError):
        estimate_tangent(circle(), 10_000)


# ---------------------------------------------------------------- curvature


def test_curvature_circle_radius_two():
    assert np.allclose(estimate_curvature(circle(2.0, 1000)), 0.5, rtol=0.02)


def test_curvature_stadium():
    c = stadium(1.0, 4.0, 0.01)
    k = estimate_curvature(c)
    mid = int(np.argmin(np.hypot(*(c.vertices - [0, -1]).T)))
    apex = int(np.argmin(np.hypot(*(c.vertices - [3, 0]).T)))
    assert k[mid] == pytest.approx(0.0, abs=1e-6)
    assert k[apex] == pytest.approx(1.0, rel=0.03)


def test_curvature_window_too_small():
    c = circle(1.0, 100)
    with pytest.raises(ParameterError):
        estimate_curvature(c, window=c.mean_spacing)


def test_curvature_collinear_is_zero():
    c = resample_arclength(ClosedCurve(SQUARE), 0.1)
    k = estimate_curvature(c, window=0.4)
    i = int(np.argmin(np.hypot(*(c.vertices - [2, 0]).T)))
    assert k[i] == 0.0


def test_curvature_converges_on_circles():
    devs = []
    for n in (50, 100, 200):
        k = estimate_curvature(circle(1.0, n), window=2 * 2 * math.pi / n)
        devs.append(np.abs(k - 1).max())
    assert devs[1] <= devs[0] / 2 + 1e-12 and devs[2] <= devs[1] / 2 + 1e-12


# ---------------------------------------------------------------- resampling


def test_resample_square():
    c = resample_arclength(ClosedCurve(SQUARE), 1.0)
    assert len(c) == 16
    assert c.perimeter == pytest.approx(16.0, abs=0.016)


def test_resample_circle_count():
    assert len(resample_arclength(circle(1.0, 1000), 2 * math.pi / 100)) == 100


@pytest.mark.parametrize("seed", range(5))
def test_resample_random_polygon(seed):
    p = random_polygon(np.random.default_rng(seed), 20)
    # each corner shortens the resampled chord by at most one step
    c = resample_arclength(p, p.perimeter / 20000)
    assert c.perimeter == pytest.approx(p.perimeter, rel=1e-3)
    assert np.median(c.segment_lengths) == pytest.approx(p.perimeter / len(c), rel=0.01)
    assert (c.signed_area > 0) == (p.signed_area > 0)


def test_resample_equal_spacing_smooth():
    c = resample_arclength(ellipse(2.0, 1.0, 4000), 0.01)
    assert np.allclose(c.segment_lengths, c.mean_spacing, rtol=0.01)


def test_resample_bad_step():
    with pytest.raises(ParameterError):
        resample_arclength(circle(), 10.0)


def test_resample_zero_perimeter():
    # three distinct vertices cannot have zero length, so check the guard directly
    c = ClosedCurve([[0, 0], [1e-300, 0], [0, 1e-300]])
    with pytest.raises((DomainError, ParameterError)):
        resample_arclength(c, 1.0)


def test_signed_area_helper():
    assert signed_area(SQUARE) == 16.0
