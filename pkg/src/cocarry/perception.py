"""Simulated 2D LIDAR sensing and obstacle-polygon extraction.

Scans are ray-cast against the true world polygons, fused into a rolling
occupancy costmap, clustered density-based, and turned into non-convex
polygons whose vertices sit on occupied-cell centers.  The warning stage
consumes only the extracted polygons, never the true world.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .geometry import Polygon, Pose2D, Vec2

UNKNOWN = 0
FREE = 1
OCCUPIED = 2


@dataclass
class LidarConfig:
    """One scanner unit, mounted on the base frame."""

    mount_pose: Pose2D
    beam_count: int = 540
    fov: float = 1.5 * math.pi
    max_range: float = 10.0
    noise_sigma: float = 0.0

    def __post_init__(self):
        if self.beam_count < 1:
            raise ValueError("beam_count must be >= 1")
        if not self.max_range > 0:
            raise ValueError("max_range must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")

    @property
    def sentinel(self) -> float:
        return self.max_range + 1.0

    def beam_angles(self) -> np.ndarray:
        """Beam angles relative to the sensor frame, uniform over the fov."""
        if self.beam_count == 1:
            return np.zeros(1)
        return np.linspace(-self.fov / 2.0, self.fov / 2.0, self.beam_count)


def default_lidar_rig() -> list[LidarConfig]:
    """Front and back scanners jointly covering 360 degrees around the base."""
    return [
        LidarConfig(mount_pose=Pose2D(Vec2(0.35, 0.0), 0.0), noise_sigma=0.005),
        LidarConfig(mount_pose=Pose2D(Vec2(-0.35, 0.0), math.pi), noise_sigma=0.005),
    ]


@dataclass
class LidarScan:
    sensor_world_pose: Pose2D
    ranges: np.ndarray
    fov: float
    max_range: float

    def __post_init__(self):
        self.ranges = np.asarray(self.ranges, dtype=float)

    @property
    def sentinel(self) -> float:
        return self.max_range + 1.0

    def world_angles(self) -> np.ndarray:
        n = len(self.ranges)
        rel = np.zeros(1) if n == 1 else np.linspace(-self.fov / 2.0, self.fov / 2.0, n)
        return rel + self.sensor_world_pose.heading

    def endpoints(self) -> np.ndarray:
        """World xy of every beam end (sentinel beams extend to max_range)."""
        ang = self.world_angles()
        r = np.where(self.ranges > self.max_range, self.max_range, self.ranges)
        o = self.sensor_world_pose.position
        return np.stack([o.x + r * np.cos(ang), o.y + r * np.sin(ang)], axis=1)


def _world_edges(world_polygons: list[Polygon]) -> tuple[np.ndarray, np.ndarray]:
    starts, ends = [], []
    for poly in world_polygons:
        for p, q in poly.edges():
            starts.append([p.x, p.y])
            ends.append([q.x, q.y])
    if not starts:
        return np.zeros((0, 2)), np.zeros((0, 2))
    return np.array(starts), np.array(ends)


def simulate_scan(
    world_polygons: list[Polygon],
    cfg: LidarConfig,
    base_pose: Pose2D,
    rng: np.random.Generator | int | None = None,
) -> LidarScan:
    """Ray-cast one scan from the sensor pose implied by the base pose.

    Per beam the closest edge intersection is returned, disturbed by Gaussian
    range noise and clamped to (0, max_range]; misses read the sentinel value.
    """
    sensor_pose = Pose2D(
        base_pose.transform(cfg.mount_pose.position),
        base_pose.heading + cfg.mount_pose.heading,
    )
    angles = cfg.beam_angles() + sensor_pose.heading
    d = np.stack([np.cos(angles), np.sin(angles)], axis=1)  # (B, 2)

    starts, ends = _world_edges(world_polygons)
    ranges = np.full(cfg.beam_count, cfg.sentinel)
    if len(starts) > 0:
        o = np.array([sensor_pose.position.x, sensor_pose.position.y])
        e = ends - starts  # (E, 2)
        r = starts - o  # (E, 2)
        cross_de = d[:, 0:1] * e[None, :, 1] - d[:, 1:2] * e[None, :, 0]  # (B, E)
        cross_re = (r[:, 0] * e[:, 1] - r[:, 1] * e[:, 0])[None, :]  # (1, E)
        cross_rd = d[:, 0:1] * r[None, :, 1] - d[:, 1:2] * r[None, :, 0]  # (B, E)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = cross_re / cross_de
            u = -cross_rd / cross_de
        valid = (np.abs(cross_de) > 1e-15) & (t >= 0.0) & (u >= 0.0) & (u <= 1.0)
        t = np.where(valid, t, np.inf)
        best = t.min(axis=1)
        hit = best <= cfg.max_range
        ranges[hit] = best[hit]

    if cfg.noise_sigma > 0:
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        hit = ranges <= cfg.max_range
        noisy = ranges[hit] + gen.normal(0.0, cfg.noise_sigma, hit.sum())
        ranges[hit] = np.clip(noisy, 1e-9, cfg.max_range)

    return LidarScan(sensor_world_pose=sensor_pose, ranges=ranges,
                     fov=cfg.fov, max_range=cfg.max_range)


@dataclass
class OccupancyGrid:
    """Rolling local occupancy grid; the robot is kept inside the central half."""

    resolution: float = 0.05
    width: int = 240
    height: int = 240
    origin: Vec2 = field(default_factory=lambda: Vec2(-6.0, -6.0))
    cells: np.ndarray | None = None

    def __post_init__(self):
        if self.cells is None:
            self.cells = np.full((self.height, self.width), UNKNOWN, dtype=np.int8)

    def cell_index(self, x: float, y: float) -> tuple[int, int]:
        """(row, col) of the cell containing a world point; may be out of bounds."""
        return (
            int(math.floor((y - self.origin.y) / self.resolution)),
            int(math.floor((x - self.origin.x) / self.resolution)),
        )

    def cell_center(self, row: int, col: int) -> Vec2:
        return Vec2(
            self.origin.x + (col + 0.5) * self.resolution,
            self.origin.y + (row + 0.5) * self.resolution,
        )

    def in_bounds(self, row: int, col: int) -> bool:
        return 0 <= row < self.height and 0 <= col < self.width

    def roll_to_center(self, robot: Vec2) -> None:
        """Shift the grid (whole cells) so the robot sits inside the central 50%."""
        row, col = self.cell_index(robot.x, robot.y)
        dr = dc = 0
        if not (self.height // 4 <= row < 3 * self.height // 4):
            dr = row - self.height // 2
        if not (self.width // 4 <= col < 3 * self.width // 4):
            dc = col - self.width // 2
        if dr == 0 and dc == 0:
            return
        new = np.full_like(self.cells, UNKNOWN)
        if abs(dr) >= self.height or abs(dc) >= self.width:
            # moved more than a whole grid: nothing carries over
            self.cells = new
            self.origin = Vec2(
                self.origin.x + dc * self.resolution,
                self.origin.y + dr * self.resolution,
            )
            return
        src_r = slice(max(dr, 0), self.height + min(dr, 0))
        dst_r = slice(max(-dr, 0), self.height + min(-dr, 0))
        src_c = slice(max(dc, 0), self.width + min(dc, 0))
        dst_c = slice(max(-dc, 0), self.width + min(-dc, 0))
        new[dst_r, dst_c] = self.cells[src_r, src_c]
        # a copy shifted by -d keeps world-fixed content when the origin moves by +d
        self.cells = new
        self.origin = Vec2(
            self.origin.x + dc * self.resolution,
            self.origin.y + dr * self.resolution,
        )

    def occupied_points(self) -> np.ndarray:
        """Occupied-cell centers in row-major order, shape (n, 2)."""
        rc = np.argwhere(self.cells == OCCUPIED)
        if len(rc) == 0:
            return np.zeros((0, 2))
        return np.stack(
            [
                self.origin.x + (rc[:, 1] + 0.5) * self.resolution,
                self.origin.y + (rc[:, 0] + 0.5) * self.resolution,
            ],
            axis=1,
        )


def update_costmap(grid: OccupancyGrid, scan: LidarScan) -> OccupancyGrid:
    """Fuse one scan: traversed cells become free, hit endpoints occupied.

    Occupied marks from the same scan win over its free marks; a previously
    occupied cell swept by a longer beam is cleared (dynamic obstacles).
    """
    o = scan.sensor_world_pose.position
    row0, col0 = grid.cell_index(o.x, o.y)
    if not grid.in_bounds(row0, col0):
        raise ValueError("scan pose outside grid")

    ends = scan.endpoints()
    hit = scan.ranges <= scan.max_range
    res = grid.resolution
    start = np.array([(o.x - grid.origin.x) / res - 0.5, (o.y - grid.origin.y) / res - 0.5])
    end = np.stack(
        [(ends[:, 0] - grid.origin.x) / res - 0.5, (ends[:, 1] - grid.origin.y) / res - 0.5],
        axis=1,
    )
    delta = end - start
    steps = np.ceil(np.abs(delta).max(axis=1)).astype(int)
    steps = np.maximum(steps, 1)
    n_max = int(steps.max())
    t = np.arange(n_max + 1)[None, :] / steps[:, None]  # (B, n_max+1)
    mask = t <= 1.0
    t = np.minimum(t, 1.0)
    px = start[0] + t * delta[:, 0:1]
    py = start[1] + t * delta[:, 1:2]
    cols = np.rint(px).astype(int)
    rows = np.rint(py).astype(int)

    free_mask = mask.copy()
    free_mask[hit, :] &= t[hit, :] < 1.0  # endpoint cell of a hit beam is not freed
    rr, cc = rows[free_mask], cols[free_mask]
    ok = (rr >= 0) & (rr < grid.height) & (cc >= 0) & (cc < grid.width)
    grid.cells[rr[ok], cc[ok]] = FREE

    er = rows[hit, :][np.arange(hit.sum()), steps[hit]] if hit.any() else np.zeros(0, int)
    ec = cols[hit, :][np.arange(hit.sum()), steps[hit]] if hit.any() else np.zeros(0, int)
    ok = (er >= 0) & (er < grid.height) & (ec >= 0) & (ec < grid.width)
    grid.cells[er[ok], ec[ok]] = OCCUPIED
    return grid


def cluster_occupied(
    grid: OccupancyGrid, eps: float = 0.15, min_pts: int = 3
) -> list[np.ndarray]:
    """DBSCAN over occupied-cell centers, visited row-major; noise cells dropped."""
    if not eps > 0 or min_pts < 1:
        raise ValueError("eps must be positive and min_pts >= 1")
    pts = grid.occupied_points()
    n = len(pts)
    if n == 0:
        return []
    tree = cKDTree(pts)
    neighbors = tree.query_ball_point(pts, eps)
    core = np.array([len(nb) >= min_pts for nb in neighbors])
    labels = np.full(n, -1)
    cluster_id = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        labels[i] = cluster_id
        frontier = [i]
        while frontier:
            j = frontier.pop(0)
            for k in sorted(neighbors[j]):
                if labels[k] == -1:
                    labels[k] = cluster_id
                    if core[k]:
                        frontier.append(k)
        cluster_id += 1
    return [pts[labels == c] for c in range(cluster_id)]


@dataclass
class ObstaclePolygon:
    polygon: Polygon
    cluster_id: int = 0


def _degenerate_polygon(points: np.ndarray) -> Polygon:
    """Polygon for <3 distinct or collinear point sets, keeping every point a vertex."""
    order = np.lexsort((points[:, 1], points[:, 0]))
    pts = points[order]
    if len(pts) == 1:
        x, y = pts[0]
        d = 1e-9
        return Polygon([Vec2(x, y), Vec2(x + d, y), Vec2(x, y + d)])
    if len(pts) == 2:
        a, b = pts
        mid = (a + b) / 2.0
        return Polygon([Vec2(*a), Vec2(*mid), Vec2(*b)])
    # collinear run: forward then backward so interior points stay vertices
    fwd = [Vec2(*p) for p in pts]
    bwd = [Vec2(*p) for p in pts[-2:0:-1]]
    return Polygon(fwd + bwd)


def _collinear(points: np.ndarray) -> bool:
    if len(points) < 3:
        return True
    d = points - points[0]
    norms = np.hypot(d[:, 0], d[:, 1])
    j = int(np.argmax(norms))
    if norms[j] < 1e-12:
        return True
    cross = d[:, 0] * d[j, 1] - d[:, 1] * d[j, 0]
    return bool(np.all(np.abs(cross) < 1e-9))


def _segments_cross(a0, a1, b0, b1) -> bool:
    """Proper crossing test for the hull walk; shared endpoints do not count."""
    def orient(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    d1 = orient(b0, b1, a0)
    d2 = orient(b0, b1, a1)
    d3 = orient(a0, a1, b0)
    d4 = orient(a0, a1, b1)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _crosses_any(seg_a: np.ndarray, seg_b: np.ndarray, edges_p: np.ndarray,
                 edges_q: np.ndarray) -> bool:
    """Vectorized proper-crossing test of one segment against many edges."""
    if len(edges_p) == 0:
        return False
    def orient(p, q, r):
        return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (
            q[..., 1] - p[..., 1]
        ) * (r[..., 0] - p[..., 0])

    d1 = orient(edges_p, edges_q, seg_a)
    d2 = orient(edges_p, edges_q, seg_b)
    d3 = orient(seg_a, seg_b, edges_p)
    d4 = orient(seg_a, seg_b, edges_q)
    # strict sign changes only: shared endpoints and collinear touches are fine
    opp_a = ((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))
    opp_b = ((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0))
    return bool(np.any(opp_a & opp_b))


def _knn_hull_attempt(pts: np.ndarray, k: int, tree: cKDTree) -> list[int] | None:
    """One k-nearest-neighbors boundary walk; None if it dead-ends."""
    n = len(pts)
    k = min(k, n - 1)
    start = int(np.lexsort((pts[:, 0], pts[:, 1]))[0])  # lowest y, then x
    hull = [start]
    used = np.zeros(n, dtype=bool)
    used[start] = True
    current = start
    # the virtual incoming edge at the start points into empty space (-x), so
    # the first sweep hugs the boundary instead of cutting into the cluster
    prev_angle = math.pi
    for _ in range(2 * n):
        _, idxs = tree.query(pts[current], k=min(k + 1, n))
        idxs = np.atleast_1d(idxs)
        cands = [
            j
            for j in idxs
            if j != current and ((j == start and len(hull) >= 3) or not used[j])
        ]
        if not cands:
            return None
        # largest clockwise rotation from the reversed incoming direction
        angs = np.arctan2(pts[cands, 1] - pts[current][1], pts[cands, 0] - pts[current][0])
        turns = (prev_angle - angs) % (2.0 * math.pi)
        order = np.argsort(-turns, kind="stable")
        hull_pts = pts[hull]
        chosen = None
        for oi in order:
            j = cands[oi]
            last = len(hull) - 1 if j == start else len(hull)
            if last >= 2 and _crosses_any(
                pts[current], pts[j], hull_pts[: last - 1], hull_pts[1:last]
            ):
                continue
            chosen = j
            break
        if chosen is None:
            return None
        if chosen == start:
            return hull
        hull.append(chosen)
        used[chosen] = True
        prev_angle = math.atan2(
            pts[hull[-2]][1] - pts[chosen][1], pts[hull[-2]][0] - pts[chosen][0]
        )
        current = chosen
    return None


def _all_inside(pts: np.ndarray, hull_idx: list[int]) -> bool:
    from matplotlib.path import Path

    ring = pts[hull_idx]
    path = Path(np.vstack([ring, ring[:1]]), closed=True)
    return bool(np.all(path.contains_points(pts, radius=1e-6) |
                       path.contains_points(pts, radius=-1e-6)))


def _convex_fallback(pts: np.ndarray) -> list[int]:
    hull = ConvexHull(pts)
    return list(hull.vertices)


def _densify_on_edges(pts: np.ndarray, ring: list[int]) -> np.ndarray:
    """Insert cluster points that lie exactly on a hull edge, keeping them as vertices."""
    out: list[np.ndarray] = []
    m = len(ring)
    ring_set = set(ring)
    extras = [i for i in range(len(pts)) if i not in ring_set]
    for h in range(m):
        a = pts[ring[h]]
        b = pts[ring[(h + 1) % m]]
        out.append(a)
        e = b - a
        L2 = float(e @ e)
        if L2 == 0.0 or not extras:
            continue
        on_edge = []
        for i in extras:
            p = pts[i]
            t = float((p - a) @ e) / L2
            if 1e-9 < t < 1.0 - 1e-9:
                perp = abs((p - a)[0] * e[1] - (p - a)[1] * e[0]) / math.sqrt(L2)
                if perp < 1e-9:
                    on_edge.append((t, i))
        for _, i in sorted(on_edge):
            out.append(pts[i])
        extras = [i for i in extras if not any(i == j for _, j in on_edge)]
    return np.array(out)


MAX_CONCAVE_POINTS = 150  # larger clusters go straight to the convex fallback
MAX_CONCAVE_K = 24


def extract_polygon(cluster: np.ndarray, cluster_id: int = 0) -> ObstaclePolygon:
    """Concave hull of a cell cluster via incremental k-nearest-neighbors walk.

    Input order does not matter; points are canonicalized before the walk.
    Collinear or tiny clusters degrade to padded polygons that still expose
    every cell center for minimum-distance queries; very large clusters use
    the convex fallback directly to bound the per-snapshot cost.
    """
    pts = np.asarray(cluster, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("empty cluster")
    pts = np.unique(pts, axis=0)  # lexicographic sort doubles as canonical order
    if len(pts) < 3 or _collinear(pts):
        return ObstaclePolygon(_degenerate_polygon(pts), cluster_id)

    ring = None
    if len(pts) <= MAX_CONCAVE_POINTS:
        tree = cKDTree(pts)
        for k in range(3, min(len(pts), MAX_CONCAVE_K + 1)):
            attempt = _knn_hull_attempt(pts, k, tree)
            if attempt is not None and len(attempt) >= 3 and _all_inside(pts, attempt):
                ring = attempt
                break
    if ring is None:
        try:
            ring = _convex_fallback(pts)
        except QhullError:
            return ObstaclePolygon(_degenerate_polygon(pts), cluster_id)
    dense = _densify_on_edges(pts, ring)
    return ObstaclePolygon(Polygon([Vec2(*p) for p in dense]), cluster_id)


def cached_extract_polygon(
    cluster: np.ndarray, cluster_id: int, cache: dict[bytes, Polygon]
) -> ObstaclePolygon:
    """extract_polygon with memoization keyed on the canonical cell set."""
    pts = np.unique(np.asarray(cluster, dtype=float).reshape(-1, 2), axis=0)
    key = pts.tobytes()
    poly = cache.get(key)
    if poly is None:
        poly = extract_polygon(pts, cluster_id).polygon
        cache[key] = poly
    return ObstaclePolygon(poly, cluster_id)


def get_all_obstacles(
    grid: OccupancyGrid,
    eps: float = 0.15,
    min_pts: int = 3,
    cache: dict[bytes, Polygon] | None = None,
) -> list[ObstaclePolygon]:
    """Cluster the current grid and extract one polygon per cluster."""
    clusters = cluster_occupied(grid, eps, min_pts)
    if cache is None:
        return [extract_polygon(c, cluster_id=i) for i, c in enumerate(clusters)]
    return [cached_extract_polygon(c, i, cache) for i, c in enumerate(clusters)]


def export_scan_log(scans: list[tuple[float, LidarScan]], path: str) -> None:
    """One scan per line: timestamp, sensor pose, fov/max_range, ranges."""
    with open(path, "w") as f:
        for t, scan in scans:
            rec = {
                "t": round(t, 6),
                "pose": [
                    scan.sensor_world_pose.position.x,
                    scan.sensor_world_pose.position.y,
                    scan.sensor_world_pose.heading,
                ],
                "fov": scan.fov,
                "max_range": scan.max_range,
                "ranges": [round(float(r), 6) for r in scan.ranges],
            }
            f.write(json.dumps(rec) + "\n")


def import_scan_log(path: str) -> list[tuple[float, LidarScan]]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            pose = Pose2D(Vec2(rec["pose"][0], rec["pose"][1]), rec["pose"][2])
            out.append(
                (
                    rec["t"],
                    LidarScan(
                        sensor_world_pose=pose,
                        ranges=np.array(rec["ranges"]),
                        fov=rec["fov"],
                        max_range=rec["max_range"],
                    ),
                )
            )
    return out
