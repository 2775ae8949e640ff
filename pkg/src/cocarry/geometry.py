"""Planar/spatial geometry primitives shared by control, perception and warning code."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite Vec2 components: ({self.x}, {self.y})")

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def scaled(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    if not math.isfinite(a):
        raise ValueError(f"non-finite angle: {a}")
    w = (a + math.pi) % (2.0 * math.pi) - math.pi
    if w == -math.pi:
        w = math.pi
    return w


@dataclass(frozen=True)
class Pose2D:
    """Planar pose; heading normalized to (-pi, pi] at construction."""

    position: Vec2
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", wrap_angle(self.heading))

    def transform(self, p: Vec2) -> Vec2:
        """Map a point from this pose's local frame into the world frame."""
        c, s = math.cos(self.heading), math.sin(self.heading)
        return Vec2(
            self.position.x + c * p.x - s * p.y,
            self.position.y + s * p.x + c * p.y,
        )


@dataclass
class PoseSE3:
    """Spatial pose: 3-vector position and unit quaternion (x, y, z, w)."""

    position: np.ndarray
    orientation: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float).reshape(3)
        q = np.asarray(self.orientation, dtype=float).reshape(4)
        n = np.linalg.norm(q)
        if abs(n - 1.0) > 1e-9:
            if n == 0.0 or not np.isfinite(n):
                raise ValueError("quaternion is not normalizable")
            q = q / n
        self.orientation = q

    @staticmethod
    def identity() -> "PoseSE3":
        return PoseSE3(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]))

    def copy(self) -> "PoseSE3":
        return PoseSE3(self.position.copy(), self.orientation.copy())


@dataclass
class Polygon:
    """Closed planar polygon, stored as an ordered open vertex ring."""

    vertices: list[Vec2] = field(default_factory=list)

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        for a, b in zip(self.vertices, self.vertices[1:] + self.vertices[:1]):
            if a.x == b.x and a.y == b.y:
                raise ValueError("consecutive duplicate polygon vertices")

    @staticmethod
    def rectangle(center: Vec2, length: float, width: float, yaw: float = 0.0) -> "Polygon":
        """Axis rectangle of `length` along local x, `width` along local y, rotated by yaw."""
        pose = Pose2D(center, yaw)
        hl, hw = length / 2.0, width / 2.0
        corners = [Vec2(hl, hw), Vec2(-hl, hw), Vec2(-hl, -hw), Vec2(hl, -hw)]
        return Polygon([pose.transform(c) for c in corners])

    def edges(self) -> list[tuple[Vec2, Vec2]]:
        return list(zip(self.vertices, self.vertices[1:] + self.vertices[:1]))

    def as_array(self) -> np.ndarray:
        return np.array([[v.x, v.y] for v in self.vertices])

    def contains(self, p: Vec2) -> bool:
        """Point-in-polygon test, closed-set convention (boundary counts as inside)."""
        verts = self.as_array()
        n = len(verts)
        inside = False
        for i in range(n):
            ax, ay = verts[i]
            bx, by = verts[(i + 1) % n]
            # boundary check
            cross = (bx - ax) * (p.y - ay) - (by - ay) * (p.x - ax)
            if abs(cross) < 1e-12:
                if min(ax, bx) - 1e-12 <= p.x <= max(ax, bx) + 1e-12 and \
                   min(ay, by) - 1e-12 <= p.y <= max(ay, by) + 1e-12:
                    return True
            if (ay > p.y) != (by > p.y):
                t = (p.y - ay) / (by - ay)
                if p.x < ax + t * (bx - ax):
                    inside = not inside
        return inside


def point_set_min_pair(a: list[Vec2], b: list[Vec2]) -> tuple[float, Vec2, Vec2]:
    """Closest pair between two point sets.

    Ties are broken by lowest (index in a, index in b) so replays are bit-stable.
    """
    if not a or not b:
        raise ValueError("point sets must be non-empty")
    arr_a = np.array([[p.x, p.y] for p in a])
    arr_b = np.array([[p.x, p.y] for p in b])
    d2 = ((arr_a[:, None, :] - arr_b[None, :, :]) ** 2).sum(axis=2)
    flat = int(np.argmin(d2))  # argmin is row-major: lowest (i, j) on ties
    i, j = divmod(flat, len(b))
    return math.sqrt(d2[i, j]), a[i], b[j]


def segment_ray_intersection(
    origin: Vec2, direction: Vec2, seg: tuple[Vec2, Vec2]
) -> float | None:
    """Distance along a unit-direction ray to a segment, or None if it misses."""
    p, q = seg
    ex, ey = q.x - p.x, q.y - p.y
    if ex == 0.0 and ey == 0.0:
        raise ValueError("degenerate zero-length segment")
    dx, dy = direction.x, direction.y
    denom = dx * (-ey) - dy * (-ex)  # det([d, -e])
    if abs(denom) < 1e-15:
        return None  # parallel (collinear grazing treated as a miss)
    rx, ry = p.x - origin.x, p.y - origin.y
    t = (rx * (-ey) - ry * (-ex)) / denom
    u = (dx * ry - dy * rx) / denom
    if t >= 0.0 and 0.0 <= u <= 1.0:
        return t
    return None


def polygons_intersect(a: Polygon, b: Polygon) -> bool:
    """True if two polygons touch or overlap (closed-set convention)."""
    for pa, qa in a.edges():
        for pb, qb in b.edges():
            if _segments_intersect(pa, qa, pb, qb):
                return True
    return a.contains(b.vertices[0]) or b.contains(a.vertices[0])


def _orient(a: Vec2, b: Vec2, c: Vec2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool:
    return (
        min(a.x, b.x) - 1e-12 <= p.x <= max(a.x, b.x) + 1e-12
        and min(a.y, b.y) - 1e-12 <= p.y <= max(a.y, b.y) + 1e-12
    )


def _segments_intersect(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> bool:
    d1 = _orient(p2, q2, p1)
    d2 = _orient(p2, q2, q1)
    d3 = _orient(p1, q1, p2)
    d4 = _orient(p1, q1, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)):
        return True
    if abs(d1) < 1e-12 and _on_segment(p2, q2, p1):
        return True
    if abs(d2) < 1e-12 and _on_segment(p2, q2, q1):
        return True
    if abs(d3) < 1e-12 and _on_segment(p1, q1, p2):
        return True
    if abs(d4) < 1e-12 and _on_segment(p1, q1, q2):
        return True
    return False
