"""Geometry primitives checked against brute-force oracles."""

import math

import numpy as np
import pytest

from cocarry.geometry import (
    Polygon,
    Pose2D,
    Vec2,
    point_set_min_pair,
    polygons_intersect,
    segment_ray_intersection,
    wrap_angle,
)


def test_wrap_angle_range():
    rng = np.random.default_rng(7)
    for a in rng.uniform(-50, 50, size=500):
        w = wrap_angle(float(a))
        assert -math.pi < w <= math.pi
        assert abs(math.sin(w) - math.sin(a)) < 1e-12
        assert abs(math.cos(w) - math.cos(a)) < 1e-12


def test_wrap_angle_identity_inside_range():
    for a in (-3.0, -1.0, 0.0, 0.5, 3.1):
        assert wrap_angle(a) == pytest.approx(a, abs=1e-15)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(math.pi) == pytest.approx(math.pi)


def test_rectangle_vertices_ccw():
    poly = Polygon.rectangle(Vec2(1.0, 2.0), 4.0, 2.0)
    v = poly.as_array()
    area = 0.0
    for i in range(len(v)):
        a, b = v[i], v[(i + 1) % len(v)]
        area += a[0] * b[1] - b[0] * a[1]
    assert area / 2.0 == pytest.approx(4.0 * 2.0)


def test_polygon_contains_boundary_closed():
    poly = Polygon.rectangle(Vec2(0.0, 0.0), 2.0, 2.0)
    assert poly.contains(Vec2(0.0, 0.0))
    assert poly.contains(Vec2(1.0, 0.0))  # edge
    assert poly.contains(Vec2(1.0, 1.0))  # corner
    assert not poly.contains(Vec2(1.0001, 0.0))


def test_polygon_rejects_degenerate():
    with pytest.raises(ValueError):
        Polygon([Vec2(0, 0), Vec2(1, 0)])
    with pytest.raises(ValueError):
        Polygon([Vec2(0, 0), Vec2(0, 0), Vec2(1, 1)])


def test_min_pair_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(50):
        a = [Vec2(*p) for p in rng.uniform(-3, 3, size=(int(rng.integers(1, 30)), 2))]
        b = [Vec2(*p) for p in rng.uniform(-3, 3, size=(int(rng.integers(1, 30)), 2))]
        d, pa, pb = point_set_min_pair(a, b)
        best = min((p - q).norm() for p in a for q in b)
        assert d == pytest.approx(best, abs=1e-12)
        assert (pa - pb).norm() == pytest.approx(d, abs=1e-12)


def test_min_pair_tie_break_row_major():
    a = [Vec2(0.0, 0.0), Vec2(1.0, 0.0)]
    b = [Vec2(0.0, 1.0), Vec2(1.0, 1.0)]
    d, pa, pb = point_set_min_pair(a, b)
    assert d == pytest.approx(1.0)
    assert (pa, pb) == (a[0], b[0])


def test_segment_ray_intersection_oracle():
    # independent oracle: solve origin + t*d = p + u*(q-p) as a 2x2 system
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(300):
        origin = Vec2(*rng.uniform(-2, 2, size=2))
        ang = float(rng.uniform(-math.pi, math.pi))
        d = Vec2(math.cos(ang), math.sin(ang))
        p = Vec2(*rng.uniform(-2, 2, size=2))
        q = Vec2(*rng.uniform(-2, 2, size=2))
        t = segment_ray_intersection(origin, d, (p, q))
        A = np.array([[d.x, p.x - q.x], [d.y, p.y - q.y]])
        if abs(np.linalg.det(A)) < 1e-12:
            assert t is None
            continue
        sol = np.linalg.solve(A, (p - origin).as_array())
        expect = sol[0] if (sol[0] >= 0 and 0 <= sol[1] <= 1) else None
        if expect is None:
            assert t is None
        else:
            assert t == pytest.approx(expect, abs=1e-9)
            checked += 1
    assert checked > 20  # the random draw actually exercised hits


def test_segment_ray_parallel_miss():
    t = segment_ray_intersection(Vec2(0, 0), Vec2(1, 0), (Vec2(1, 1), Vec2(3, 1)))
    assert t is None


def test_polygons_intersect_cases():
    a = Polygon.rectangle(Vec2(0, 0), 2, 2)
    b = Polygon.rectangle(Vec2(1.5, 0), 2, 2)  # overlapping
    c = Polygon.rectangle(Vec2(5, 0), 2, 2)  # disjoint
    d = Polygon.rectangle(Vec2(0, 0), 0.5, 0.5)  # fully inside a
    e = Polygon.rectangle(Vec2(2.0, 0), 2, 2)  # shares an edge with a
    assert polygons_intersect(a, b)
    assert not polygons_intersect(a, c)
    assert polygons_intersect(a, d)
    assert polygons_intersect(d, a)
    assert polygons_intersect(a, e)


def test_pose2d_transform():
    pose = Pose2D(Vec2(1.0, -2.0), math.pi / 2)
    world = pose.transform(Vec2(1.0, 0.0))
    assert world.x == pytest.approx(1.0, abs=1e-12)
    assert world.y == pytest.approx(-1.0, abs=1e-12)
