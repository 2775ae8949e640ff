"""Deterministic fixed-step simulation world.

One tick (100 Hz): integrate the operator hand from its command, pass the
object spring-damper force through the admittance, blend with the hand
velocity via the adaptive index, advance the end-effector reference, solve the
whole-body controller and integrate the joints.  Every 10th tick runs the
perception/warning pipeline on the latest completed grid and re-checks ground
truth collisions; telemetry frames are emitted at 20 Hz.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import wholebody
from .geometry import Polygon, Pose2D, Vec2, polygons_intersect
from .interface import (
    AdmittanceParams,
    AdmittanceState,
    ReferenceState,
    SlidingWindow,
    admittance_step,
    adaptive_index,
    fuse_velocity,
    integrate_reference,
)
from .perception import (
    LidarScan,
    OccupancyGrid,
    default_lidar_rig,
    get_all_obstacles,
    simulate_scan,
    update_costmap,
)
from .scenario import ScenarioSpec
from .warning import (
    VibrationCommand,
    WarningModule,
    footprint_points,
    format_vibration_log_line,
)

CONTROL_DT = 0.01
PERCEPTION_EVERY = 10  # ticks -> 10 Hz
TELEMETRY_EVERY = 5  # ticks -> 20 Hz
V_MAX = 1.0
REF_V_MAX = 1.5  # platform speed limit applied to the fused reference velocity
HAND_FILTER_TAU = 0.2
DRIVE_TAU = 0.4  # first-order drive lag; tracking is not instantaneous, so
# interaction force actually develops through the carried object
ROBOT_BODY = (0.8, 0.6)  # base footprint, meters


@dataclass(frozen=True)
class HumanCommand:
    """Commanded planar hand velocity; magnitude clamped to V_MAX."""

    vx: float = 0.0
    vy: float = 0.0

    def clamped(self) -> tuple[float, float]:
        n = math.hypot(self.vx, self.vy)
        if n <= V_MAX or n == 0.0:
            return self.vx, self.vy
        return self.vx * V_MAX / n, self.vy * V_MAX / n


@dataclass
class TelemetryFrame:
    tick: int
    time: float
    base: tuple[float, float, float]
    q: list[float]
    ee: list[float]
    hand: list[float]
    alpha: float
    force: list[float]
    scan_points: list[list[float]]
    obstacles: list[list[list[float]]]
    footprint: list[list[float]]
    vibration: dict
    warned_distance: float | None
    min_distance: float | None
    collision: bool

    def to_json(self) -> str:
        def r(x):
            return round(float(x), 6)

        return json.dumps(
            {
                "tick": self.tick,
                "t": r(self.time),
                "base": [r(v) for v in self.base],
                "q": [r(v) for v in self.q],
                "ee": [r(v) for v in self.ee],
                "hand": [r(v) for v in self.hand],
                "alpha": r(self.alpha),
                "force": [r(v) for v in self.force],
                "scan": [[r(a), r(b)] for a, b in self.scan_points],
                "obstacles": [[[r(a), r(b)] for a, b in poly] for poly in self.obstacles],
                "footprint": [[r(a), r(b)] for a, b in self.footprint],
                "vibration": self.vibration,
                "warned_d": None if self.warned_distance is None else r(self.warned_distance),
                "min_d": None if self.min_distance is None else r(self.min_distance),
                "collision": self.collision,
            },
            separators=(",", ":"),
        )

    @staticmethod
    def from_json(line: str) -> "TelemetryFrame":
        d = json.loads(line)
        return TelemetryFrame(
            tick=d["tick"], time=d["t"], base=tuple(d["base"]), q=d["q"], ee=d["ee"],
            hand=d["hand"], alpha=d["alpha"], force=d["force"], scan_points=d["scan"],
            obstacles=d["obstacles"], footprint=d["footprint"], vibration=d["vibration"],
            warned_distance=d["warned_d"], min_distance=d["min_d"], collision=d["collision"],
        )


def object_force(
    hand_pos: np.ndarray,
    ee_pos: np.ndarray,
    hand_vel: np.ndarray,
    ee_vel: np.ndarray,
    model,
) -> np.ndarray:
    """Spring-damper force the carried object applies at the end-effector."""
    stretch = hand_pos - ee_pos - model.rest_offset
    return model.stiffness * stretch + model.damping * (hand_vel - ee_vel)


def carried_box_polygon(ee_xy: np.ndarray, hand_xy: np.ndarray, dims) -> Polygon:
    """Rigid box footprint between the two grasp points."""
    center = Vec2(*((ee_xy + hand_xy) / 2.0))
    axis = hand_xy - ee_xy
    yaw = math.atan2(axis[1], axis[0]) if np.linalg.norm(axis) > 1e-9 else 0.0
    return Polygon.rectangle(center, dims[0], dims[1], yaw)


class SimWorld:
    """Owner of the full simulation state; advanced tick by tick."""

    def __init__(self, scenario: ScenarioSpec, seed: int = 0):
        self.scenario = scenario
        self.seed = seed
        self.rng = np.random.default_rng(seed)
        self.model = wholebody.default_model()
        self.gains = wholebody.default_gains()
        self.reset()

    def reset(self) -> None:
        sc = self.scenario
        self.rng = np.random.default_rng(self.seed)
        self.tick = 0
        self.time = 0.0
        q0 = self.model.q_def.copy()
        q0[0] = sc.robot_start.position.x
        q0[1] = sc.robot_start.position.y
        q0[2] = sc.robot_start.heading
        self.joints = wholebody.JointState(q0)
        ee0 = wholebody.forward_kinematics(self.model, self.joints)
        self.reference = ReferenceState(x_d=ee0.copy(), alpha=1.0)
        self.admittance = AdmittanceState()
        self.adm_params = AdmittanceParams(
            mass=np.full(3, sc.admittance_mass), damping=np.full(3, sc.admittance_damping)
        )
        self.window = SlidingWindow(length=sc.window_length, epsilon=sc.window_epsilon)
        self.hand_pos = ee0.position + sc.object_model.rest_offset
        self.hand_vel = np.zeros(3)
        self.ee_vel = np.zeros(3)
        self.grid = OccupancyGrid(
            origin=Vec2(sc.robot_start.position.x - 6.0, sc.robot_start.position.y - 6.0)
        )
        self.lidars = default_lidar_rig()
        self.warning = WarningModule(params=sc.warning_params, footprint=sc.footprint)
        self.obstacle_polys = []
        self.last_command = VibrationCommand(None, 0.0)
        self.last_scans: list[LidarScan] = []
        self.collision = False
        self.qdot = np.zeros(self.model.total_dof)
        self._poly_cache: dict[bytes, Polygon] = {}
        self.force = np.zeros(3)
        self.alpha = 1.0
        self.warned_distance: float | None = None
        self.min_distance: float | None = None
        self.world_polys = sc.world_polygons()

    @property
    def base_pose(self) -> Pose2D:
        q = self.joints.q
        return Pose2D(Vec2(q[0], q[1]), q[2])

    def finished(self) -> bool:
        return (not self.collision) and self.joints.q[0] >= self.scenario.finish_x

    def step(self, cmd: HumanCommand) -> None:
        dt = CONTROL_DT
        sc = self.scenario

        # operator hand: low-pass filtered command, then integrate
        vx, vy = cmd.clamped()
        target = np.array([vx, vy, 0.0])
        a = dt / (HAND_FILTER_TAU + dt)
        self.hand_vel = self.hand_vel + a * (target - self.hand_vel)
        self.hand_pos = self.hand_pos + self.hand_vel * dt

        # force through the object, admittance, adaptive blend
        ee_pose = wholebody.forward_kinematics(self.model, self.joints)
        self.force = object_force(
            self.hand_pos, ee_pose.position, self.hand_vel, self.ee_vel, sc.object_model
        )
        self.admittance = admittance_step(self.force, self.admittance, self.adm_params, dt)
        self.window.push(self.time + dt, self.admittance.v_adm, self.hand_vel)
        self.alpha = adaptive_index(self.window)
        v_d = fuse_velocity(self.admittance.v_adm, self.hand_vel, self.alpha)
        speed = np.linalg.norm(v_d)
        if speed > REF_V_MAX:
            v_d = v_d * (REF_V_MAX / speed)
        self.reference = integrate_reference(self.reference, v_d, dt)
        self.reference.alpha = self.alpha

        # whole-body control
        target_task = wholebody.TaskTarget(
            x_d=self.reference.x_d, xdot_d=np.concatenate([v_d, np.zeros(3)])
        )
        qdot_cmd = wholebody.solve_clik(self.model, self.joints, target_task, self.gains)
        self.qdot = self.qdot + (dt / (DRIVE_TAU + dt)) * (qdot_cmd - self.qdot)
        J = wholebody.whole_body_jacobian(self.model, self.joints)
        self.ee_vel = (J @ self.qdot)[:3]
        self.joints = wholebody.integrate_joints(self.joints, self.qdot, dt)

        self.tick += 1
        self.time += dt

        if self.tick % PERCEPTION_EVERY == 0:
            self._perception_step()
        self._collision_step()

    def _perception_step(self) -> None:
        base = self.base_pose
        self.grid.roll_to_center(base.position)
        self.last_scans = []
        for cfg in self.lidars:
            scan = simulate_scan(self.world_polys, cfg, base, rng=self.rng)
            update_costmap(self.grid, scan)
            self.last_scans.append(scan)
        self.obstacle_polys = get_all_obstacles(self.grid, cache=self._poly_cache)
        self.last_command = self.warning.step(self.obstacle_polys, base)
        ranked = [r for r in self.warning.last_ranked
                  if r.distance <= self.warning.params.d_max]
        self.min_distance = min((r.distance for r in ranked), default=None)
        self.warned_distance = (
            self.warning.last_warned.distance if self.warning.last_warned else None
        )

    def _collision_step(self) -> None:
        if self.collision:
            return
        base = self.base_pose
        body = Polygon.rectangle(base.position, ROBOT_BODY[0], ROBOT_BODY[1], base.heading)
        ee_xy = wholebody.forward_kinematics(self.model, self.joints).position[:2]
        box = carried_box_polygon(ee_xy, self.hand_pos[:2], self.scenario.object_model.dimensions)
        for poly in self.world_polys:
            if polygons_intersect(body, poly) or polygons_intersect(box, poly):
                self.collision = True
                return

    def telemetry_frame(self) -> TelemetryFrame:
        ee_pose = wholebody.forward_kinematics(self.model, self.joints)
        fp = footprint_points(self.scenario.footprint, self.base_pose)
        scan_pts: list[list[float]] = []
        for scan in self.last_scans:
            pts = scan.endpoints()[scan.ranges <= scan.max_range]
            scan_pts.extend(pts[::6].tolist())  # decimated cloud for the UI
        vib = {
            "region": self.last_command.region.value if self.last_command.region else None,
            "intensity": round(self.last_command.intensity, 4),
        }
        return TelemetryFrame(
            tick=self.tick,
            time=self.time,
            base=(self.joints.q[0], self.joints.q[1], self.joints.q[2]),
            q=list(self.joints.q),
            ee=list(ee_pose.position) + list(ee_pose.orientation),
            hand=list(self.hand_pos),
            alpha=self.alpha,
            force=list(self.force),
            scan_points=scan_pts,
            obstacles=[[[v.x, v.y] for v in o.polygon.vertices] for o in self.obstacle_polys],
            footprint=[[p.x, p.y] for p in fp.points],
            vibration=vib,
            warned_distance=self.warned_distance,
            min_distance=self.min_distance,
            collision=self.collision,
        )


@dataclass
class RunLog:
    result: str  # finish | collision | timeout
    end_time: float
    frames: list[TelemetryFrame]
    vibration_lines: list[str]
    telemetry_path: Path | None = None
    vibration_path: Path | None = None


class Script:
    """Timestamped command list with zero-order hold."""

    def __init__(self, entries: list[tuple[float, float, float]]):
        times = [e[0] for e in entries]
        if times != sorted(times):
            raise ValueError("script timestamps must be monotone")
        self.entries = entries

    @staticmethod
    def load(path: str | Path) -> "Script":
        data = json.loads(Path(path).read_text())
        return Script([(float(e["t"]), float(e["vx"]), float(e["vy"])) for e in data])

    @staticmethod
    def load_bundled(name: str) -> "Script":
        from importlib import resources

        path = resources.files("cocarry") / "scripts" / f"{name}.json"
        return Script.load(str(path))

    def command_at(self, t: float) -> HumanCommand:
        cmd = HumanCommand(0.0, 0.0)
        for et, vx, vy in self.entries:
            if et <= t + 1e-12:
                cmd = HumanCommand(vx, vy)
            else:
                break
        return cmd


def run_headless(
    scenario: ScenarioSpec,
    script: Script | None = None,
    out_dir: str | Path | None = None,
    seed: int = 0,
    duration: float | None = None,
) -> RunLog:
    """Deterministic run to the finish line, first collision, or timeout."""
    world = SimWorld(scenario, seed=seed)
    script = script or Script([])
    max_time = duration if duration is not None else scenario.timeout
    frames: list[TelemetryFrame] = []
    vib_lines: list[str] = []
    result = "timeout"
    frames.append(world.telemetry_frame())
    while world.time < max_time - 1e-9:
        world.step(script.command_at(world.time))
        if world.tick % PERCEPTION_EVERY == 0:
            vib_lines.append(format_vibration_log_line(world.time, world.last_command))
        if world.tick % TELEMETRY_EVERY == 0:
            frames.append(world.telemetry_frame())
        if world.collision:
            result = "collision"
            break
        if world.finished():
            result = "finish"
            break
    if frames[-1].tick != world.tick:
        frames.append(world.telemetry_frame())

    log = RunLog(
        result=result,
        end_time=world.time,
        frames=frames,
        vibration_lines=vib_lines,
    )
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        log.telemetry_path = out / "telemetry.jsonl"
        log.vibration_path = out / "vibration.log"
        with open(log.telemetry_path, "w") as f:
            for fr in frames:
                f.write(fr.to_json() + "\n")
        with open(log.vibration_path, "w") as f:
            for line in vib_lines:
                f.write(line + "\n")
        summary = {
            "scenario": scenario.name,
            "seed": seed,
            "result": result,
            "end_time": round(world.time, 6),
            "final_base": [round(float(v), 6) for v in world.joints.q[:3]],
        }
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return log
