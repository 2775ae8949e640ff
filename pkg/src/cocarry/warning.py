"""Obstacle warning stage feeding the 4-sector vibrotactile belt.

An expanded rectangular footprint covers both the robot and the operator.
Each perceived polygon is ranked by the minimum distance between 12 footprint
boundary samples and the polygon vertices; its body-relative region comes from
the centroid-to-closest-vertex bearing.  A hysteresis rule keeps warning about
the previous region unless a new obstacle is closer by a fixed ratio, and the
vibration intensity falls linearly with distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .geometry import Pose2D, Vec2, point_set_min_pair, wrap_angle
from .perception import ObstaclePolygon


class Region(str, Enum):
    FRONT = "front"
    RIGHT = "right"
    BACK = "back"
    LEFT = "left"


@dataclass(frozen=True)
class FootprintSpec:
    """Expanded human+robot footprint rectangle, posed relative to the base."""

    length: float = 2.4
    width: float = 0.8
    offset: Vec2 = Vec2(0.75, 0.0)

    def __post_init__(self):
        if not (self.length > 0 and self.width > 0):
            raise ValueError("footprint dimensions must be positive")


@dataclass(frozen=True)
class RegionAngles:
    """Half-angles of the front and back sectors (narrow front, wide back)."""

    theta_f: float = 0.23
    theta_b: float = 0.70

    def __post_init__(self):
        if not (0 < self.theta_f < math.pi / 2 and 0 < self.theta_b < math.pi / 2):
            raise ValueError("sector half-angles must be in (0, pi/2)")


@dataclass(frozen=True)
class WarningParams:
    d_max: float = 1.1
    d_crit: float = 0.2
    switch_ratio: float = 0.8
    angles: RegionAngles = RegionAngles()

    def __post_init__(self):
        if not 0 < self.d_crit < self.d_max:
            raise ValueError("need 0 < d_crit < d_max")
        if not 0 < self.switch_ratio <= 1:
            raise ValueError("switch_ratio must be in (0, 1]")


@dataclass(frozen=True)
class VibrationCommand:
    region: Region | None
    intensity: float

    def __post_init__(self):
        if (self.region is None) != (self.intensity == 0.0):
            raise ValueError("region absent iff intensity is zero")


@dataclass
class FootprintPoints:
    points: list[Vec2]  # 12 boundary samples
    centroid: Vec2
    heading: float


@dataclass
class RankedObstacle:
    obstacle: ObstaclePolygon
    distance: float
    region: Region
    closest_point: Vec2


def footprint_points(spec: FootprintSpec, base_pose: Pose2D) -> FootprintPoints:
    """12 boundary samples: 4 corners then 2 interior points per edge, CCW from front-left."""
    hl, hw = spec.length / 2.0, spec.width / 2.0
    cx, cy = spec.offset.x, spec.offset.y
    corners = [
        Vec2(cx + hl, cy + hw),  # front-left
        Vec2(cx - hl, cy + hw),  # back-left
        Vec2(cx - hl, cy - hw),  # back-right
        Vec2(cx + hl, cy - hw),  # front-right
    ]
    local = list(corners)
    for a, b in zip(corners, corners[1:] + corners[:1]):
        local.append(Vec2(a.x + (b.x - a.x) / 3.0, a.y + (b.y - a.y) / 3.0))
        local.append(Vec2(a.x + 2.0 * (b.x - a.x) / 3.0, a.y + 2.0 * (b.y - a.y) / 3.0))
    return FootprintPoints(
        points=[base_pose.transform(p) for p in local],
        centroid=base_pose.transform(spec.offset),
        heading=base_pose.heading,
    )


def classify_region(phi: float, angles: RegionAngles) -> Region:
    """Sector of a centroid-relative bearing (already heading-compensated)."""
    phi = wrap_angle(phi)
    if abs(phi) <= angles.theta_f:
        return Region.FRONT
    if math.pi - abs(phi) <= angles.theta_b:
        return Region.BACK
    return Region.LEFT if phi > 0 else Region.RIGHT


def rank_obstacle(
    obstacle: ObstaclePolygon, fp: FootprintPoints, angles: RegionAngles
) -> RankedObstacle:
    dist, _, closest = point_set_min_pair(fp.points, obstacle.polygon.vertices)
    phi = wrap_angle(
        math.atan2(closest.y - fp.centroid.y, closest.x - fp.centroid.x) - fp.heading
    )
    return RankedObstacle(
        obstacle=obstacle,
        distance=dist,
        region=classify_region(phi, angles),
        closest_point=closest,
    )


def select_warning(
    ranked: list[RankedObstacle], prev: Region | None, p: WarningParams
) -> tuple[Region | None, RankedObstacle | None]:
    """Hysteretic selection of the obstacle to warn about.

    Among obstacles under d_max, the globally closest wins unless the previous
    region still holds an obstacle and the closest one elsewhere fails to
    undercut it by switch_ratio; first-in-list wins distance ties so replays
    are stable.
    """
    under = [r for r in ranked if r.distance <= p.d_max]
    if not under:
        return None, None

    def closest(obs: list[RankedObstacle]) -> RankedObstacle:
        return min(obs, key=lambda r: r.distance)

    best = closest(under)
    in_prev = [r for r in under if prev is not None and r.region == prev]
    if not in_prev:
        return best.region, best
    if best.region == prev:
        return best.region, best
    best_prev = closest(in_prev)
    if best.distance < best_prev.distance * p.switch_ratio:
        return best.region, best  # switch
    return best_prev.region, best_prev  # no switch


def compute_intensity(d: float, p: WarningParams) -> float:
    """Linear proximity ramp: 1 at/below d_crit, 0 at d_max, no command beyond."""
    if d < 0:
        raise ValueError("distance must be >= 0")
    if d <= p.d_crit:
        return 1.0
    if d <= p.d_max:
        return 1.0 - (d - p.d_crit) / (p.d_max - p.d_crit)
    return 0.0


class WarningModule:
    """Stateful wrapper holding the previously warned region across steps."""

    def __init__(self, params: WarningParams | None = None,
                 footprint: FootprintSpec | None = None):
        self.params = params or WarningParams()
        self.footprint = footprint or FootprintSpec()
        self.prev_region: Region | None = None
        self.last_ranked: list[RankedObstacle] = []
        self.last_warned: RankedObstacle | None = None

    def step(self, polygons: list[ObstaclePolygon], base_pose: Pose2D) -> VibrationCommand:
        fp = footprint_points(self.footprint, base_pose)
        self.last_ranked = [rank_obstacle(o, fp, self.params.angles) for o in polygons]
        region, warned = select_warning(self.last_ranked, self.prev_region, self.params)
        self.prev_region = region
        self.last_warned = warned
        if region is None:
            return VibrationCommand(None, 0.0)
        intensity = compute_intensity(warned.distance, self.params)
        if intensity == 0.0:
            # warned obstacle sits exactly at d_max: zero drive, so no command
            return VibrationCommand(None, 0.0)
        return VibrationCommand(region, intensity)


def format_vibration_log_line(t: float, cmd: VibrationCommand) -> str:
    region = cmd.region.value if cmd.region is not None else "none"
    intensity = cmd.intensity
    if cmd.region is not None:
        intensity = max(intensity, 1e-4)  # keep region/intensity coupling after rounding
    return f"{t:.3f} {region} {intensity:.4f}"


def parse_vibration_log_line(line: str) -> tuple[float, VibrationCommand]:
    t_s, region_s, intensity_s = line.split()
    region = None if region_s == "none" else Region(region_s)
    intensity = float(intensity_s)
    if region is None:
        intensity = 0.0
    return float(t_s), VibrationCommand(region, intensity)
