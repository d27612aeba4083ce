from __future__ import annotations

import math

import numpy as np
import pytest

from mask2inst import Contour, Mask, contour_area, convex_hull, convexity_defects, trace_contours
from mask2inst.contours import signed_area
from conftest import annulus_mask, disc_mask, dumbbell_mask
from oracles import hull_vertices_brute, max_arc_distance_brute


def _contour(points, kind="outer", parent=None):
    pts = np.asarray(points, dtype=np.int32)
    return Contour(points=pts, kind=kind, parent=parent, area=abs(signed_area(pts)))


def test_trace_solid_square():
    arr = np.zeros((5, 5), dtype=bool)
    arr[1:4, 1:4] = True
    cs = trace_contours(Mask(arr))
    assert len(cs) == 1
    assert cs[0].kind == "outer"
    assert cs[0].parent is None


def test_trace_annulus_topology():
    arr = np.zeros((11, 11), dtype=bool)
    arr[2:9, 2:9] = True
    arr[4:7, 4:7] = False  # 3x3 hole in a 7x7 square
    cs = trace_contours(Mask(arr))
    kinds = [c.kind for c in cs]
    assert kinds == ["outer", "inner"]
    assert cs[1].parent == 0


def test_trace_two_squares():
    arr = np.zeros((8, 14), dtype=bool)
    arr[2:6, 1:5] = True
    arr[2:6, 8:12] = True
    cs = trace_contours(Mask(arr))
    assert [c.kind for c in cs] == ["outer", "outer"]


def test_trace_orientation_convention():
    arr = np.zeros((11, 11), dtype=bool)
    arr[2:9, 2:9] = True
    arr[4:7, 4:7] = False
    cs = trace_contours(Mask(arr))
    assert signed_area(cs[0].points) < 0  # outer: counterclockwise on screen
    assert signed_area(cs[1].points) > 0  # inner: clockwise


def test_contour_area_square():
    arr = np.zeros((9, 9), dtype=bool)
    arr[2:7, 2:7] = True  # 5x5 pixels -> traced polygon spans 4x4
    cs = trace_contours(Mask(arr))
    assert contour_area(cs[0]) == pytest.approx(16.0)


def test_contour_area_degenerate():
    assert contour_area(_contour([(3, 3)])) == 0.0


def test_contour_area_triangle():
    tri = _contour([(0, 0), (4, 0), (0, 4)])
    assert contour_area(tri) == pytest.approx(8.0)


def test_convex_hull_triangle():
    tri = _contour([(0, 0), (4, 0), (0, 4)])
    assert convex_hull(tri) == [0, 1, 2]


def test_convex_hull_l_shape_excludes_reflex():
    pts = [(0, 0), (4, 0), (4, 2), (2, 2), (2, 5), (0, 5)]
    hull = convex_hull(_contour(pts))
    expected = hull_vertices_brute(np.asarray(pts))
    got = {tuple(map(int, p)) for p in np.asarray(pts)[hull]}
    assert got == expected
    assert (2, 2) not in got  # the reflex corner


def test_convex_hull_collinear():
    pts = [(1, 1), (3, 3), (5, 5), (2, 2)]
    hull = convex_hull(_contour(pts))
    assert sorted(hull) == [0, 2]


def test_convex_hull_contains_all_points():
    rng = np.random.default_rng(61)
    for _ in range(10):
        mask = disc_mask(float(rng.uniform(4, 9)))
        c = trace_contours(mask)[0]
        hull = convex_hull(c)
        hp = c.points[hull].astype(np.float64)
        for p in c.points:
            inside = True
            n = len(hp)
            signs = []
            for i in range(n):
                a, b = hp[i], hp[(i + 1) % n]
                signs.append((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]))
            signs = np.asarray(signs)
            inside = np.all(signs <= 1e-9) or np.all(signs >= -1e-9)
            assert inside


def test_convexity_defects_disc_has_none():
    c = trace_contours(disc_mask(8.0))[0]
    assert convexity_defects(c, convex_hull(c)) == []


def test_convexity_defects_dumbbell_neck():
    # neck half-width 4: centers 2*sqrt(r^2-16) apart, analytic depth 6
    mask, _, _ = dumbbell_mask(r=10.0, d=2 * math.sqrt(100 - 16))
    c = trace_contours(mask)[0]
    defects = convexity_defects(c, convex_hull(c))
    assert len(defects) == 2
    for d in defects:
        assert d.depth == pytest.approx(6.0, abs=1.0)
    ys = sorted(d.point[1] for d in defects)
    assert ys[0] < mask.height / 2 < ys[1]  # one defect per side of the neck


def test_convexity_defects_l_shape():
    arr = np.zeros((12, 12), dtype=bool)
    arr[2:10, 2:6] = True
    arr[6:10, 2:10] = True
    c = trace_contours(Mask(arr))[0]
    hull = convex_hull(c)
    defects = convexity_defects(c, hull)
    assert len(defects) == 1
    expected = max_arc_distance_brute(c.points, defects[0].edge[0], defects[0].edge[1])
    assert defects[0].depth == pytest.approx(expected)
    # both pixels flanking the inner corner maximize the distance
    assert defects[0].point in ((5, 5), (6, 6))


def test_defect_depths_match_brute_force():
    rng = np.random.default_rng(67)
    for _ in range(6):
        mask, _, _ = dumbbell_mask(r=float(rng.uniform(7, 11)), d=float(rng.uniform(12, 19)))
        c = trace_contours(mask)[0]
        hull = convex_hull(c)
        for d in convexity_defects(c, hull):
            assert d.depth == pytest.approx(max_arc_distance_brute(c.points, d.edge[0], d.edge[1]))


def test_area_close_to_pixel_count_for_convex_shapes():
    # pixel-center polygons lose roughly half a pixel of area per boundary
    # pixel, which stays under 15% from ~130 px upward
    for r in (7.0, 9.0, 12.0):
        mask = disc_mask(r)
        c = trace_contours(mask)[0]
        pixels = mask.foreground_count()
        assert pixels >= 100
        assert abs(contour_area(c) - pixels) / pixels <= 0.15
    arr = np.zeros((20, 20), dtype=bool)
    arr[3:17, 3:17] = True
    c = trace_contours(Mask(arr))[0]
    assert abs(contour_area(c) - 14 * 14) / (14 * 14) <= 0.15


def test_inner_contour_inside_parent():
    mask = annulus_mask()
    cs = trace_contours(mask)
    outer = [c for c in cs if c.kind == "outer"][0]
    inner = [c for c in cs if c.kind == "inner"][0]
    poly = outer.points.astype(np.float64)
    n = len(poly)
    for px, py in inner.points:
        crossings = 0
        for i in range(n):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % n]
            if (y0 > py) != (y1 > py):
                xi = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
                if xi > px:
                    crossings += 1
        assert crossings % 2 == 1  # strictly inside
