"""Scenario documents: the declarative world description for a run.

Scenarios are YAML with a versioned schema.  Coordinates are world-frame
meters with the robot base starting pose as declared; the finish line is an
x-offset from the base start.  Unknown keys are rejected with the offending
location so typos do not silently change an experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .geometry import Polygon, Pose2D, Vec2
from .warning import FootprintSpec, RegionAngles, WarningParams

SCHEMA_VERSION = 1
WALL_THICKNESS = 0.1


class ScenarioError(ValueError):
    """Malformed or inconsistent scenario document."""


@dataclass
class ObjectModel:
    """Spring-damper model of the carried object between the two grasp frames."""

    stiffness: float = 2000.0
    damping: float = 120.0
    mass: float = 1.9
    dimensions: tuple[float, float, float] = (0.8, 0.6, 0.5)
    rest_offset: np.ndarray = field(default_factory=lambda: np.array([0.8, 0.0, 0.0]))

    def __post_init__(self):
        if self.stiffness < 0 or self.damping < 0:
            raise ScenarioError("object stiffness and damping must be >= 0")
        self.rest_offset = np.asarray(self.rest_offset, dtype=float).reshape(3)


@dataclass
class Room:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_min >= self.x_max or self.y_min >= self.y_max:
            raise ScenarioError("degenerate room extents")

    def wall_polygons(self) -> list[Polygon]:
        """Four wall bands just outside the room interior."""
        t = WALL_THICKNESS
        x0, x1, y0, y1 = self.x_min, self.x_max, self.y_min, self.y_max
        return [
            Polygon.rectangle(Vec2((x0 + x1) / 2, y0 - t / 2), x1 - x0 + 2 * t, t),
            Polygon.rectangle(Vec2((x0 + x1) / 2, y1 + t / 2), x1 - x0 + 2 * t, t),
            Polygon.rectangle(Vec2(x0 - t / 2, (y0 + y1) / 2), t, y1 - y0 + 2 * t),
            Polygon.rectangle(Vec2(x1 + t / 2, (y0 + y1) / 2), t, y1 - y0 + 2 * t),
        ]

    def contains_poly(self, poly: Polygon) -> bool:
        return all(
            self.x_min <= v.x <= self.x_max and self.y_min <= v.y <= self.y_max
            for v in poly.vertices
        )


@dataclass
class ScenarioSpec:
    name: str
    room: Room
    obstacles: list[Polygon]
    robot_start: Pose2D
    finish_offset: float
    object_model: ObjectModel
    warning_params: WarningParams
    footprint: FootprintSpec
    admittance_mass: float = 12.0
    admittance_damping: float = 150.0
    window_length: float = 0.5
    window_epsilon: float = 1e-6
    timeout: float = 90.0

    def world_polygons(self) -> list[Polygon]:
        """Ground-truth geometry the LIDARs and collision checks see."""
        return self.room.wall_polygons() + self.obstacles

    @property
    def finish_x(self) -> float:
        return self.robot_start.position.x + self.finish_offset


def _reject_unknown(mapping: dict, allowed: set[str], where: str) -> None:
    for key in mapping:
        if key not in allowed:
            raise ScenarioError(f"unknown field '{key}' in {where}")


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ScenarioError(f"missing field '{key}' in {where}")
    return mapping[key]


def parse_scenario(doc: dict | str, name: str = "scenario") -> ScenarioSpec:
    if isinstance(doc, str):
        doc = yaml.safe_load(doc)
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a mapping")
    _reject_unknown(
        doc,
        {"version", "name", "room", "robot_start", "finish_offset", "obstacles",
         "object", "warning", "footprint", "admittance", "window", "timeout"},
        "top level",
    )
    version = _require(doc, "version", "top level")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported scenario schema version {version}")
    name = doc.get("name", name)

    room_doc = _require(doc, "room", "top level")
    _reject_unknown(room_doc, {"x_min", "x_max", "y_min", "y_max"}, "room")
    room = Room(**{k: float(room_doc[k]) for k in ("x_min", "x_max", "y_min", "y_max")})

    rs = _require(doc, "robot_start", "top level")
    _reject_unknown(rs, {"x", "y", "heading"}, "robot_start")
    robot_start = Pose2D(Vec2(float(rs["x"]), float(rs["y"])), float(rs.get("heading", 0.0)))

    obstacles = []
    for i, ob in enumerate(doc.get("obstacles", [])):
        where = f"obstacles[{i}]"
        _reject_unknown(ob, {"x", "y", "length", "width", "yaw"}, where)
        poly = Polygon.rectangle(
            Vec2(float(_require(ob, "x", where)), float(_require(ob, "y", where))),
            float(_require(ob, "length", where)),
            float(_require(ob, "width", where)),
            float(ob.get("yaw", 0.0)),
        )
        if not room.contains_poly(poly):
            raise ScenarioError(f"{where} extends outside the room")
        obstacles.append(poly)

    finish_offset = float(_require(doc, "finish_offset", "top level"))
    if not (room.x_min <= robot_start.position.x + finish_offset <= room.x_max):
        raise ScenarioError("finish line lies outside the room")

    obj_doc = doc.get("object", {})
    _reject_unknown(
        obj_doc, {"stiffness", "damping", "mass", "dimensions", "rest_offset"}, "object"
    )
    object_model = ObjectModel(
        stiffness=float(obj_doc.get("stiffness", 2000.0)),
        damping=float(obj_doc.get("damping", 120.0)),
        mass=float(obj_doc.get("mass", 1.9)),
        dimensions=tuple(obj_doc.get("dimensions", (0.8, 0.6, 0.5))),
        rest_offset=np.asarray(obj_doc.get("rest_offset", [0.8, 0.0, 0.0]), dtype=float),
    )

    warn_doc = doc.get("warning", {})
    _reject_unknown(
        warn_doc, {"d_max", "d_crit", "switch_ratio", "theta_f", "theta_b"}, "warning"
    )
    warning_params = WarningParams(
        d_max=float(warn_doc.get("d_max", 1.1)),
        d_crit=float(warn_doc.get("d_crit", 0.2)),
        switch_ratio=float(warn_doc.get("switch_ratio", 0.8)),
        angles=RegionAngles(
            theta_f=float(warn_doc.get("theta_f", 0.23)),
            theta_b=float(warn_doc.get("theta_b", 0.70)),
        ),
    )

    fp_doc = doc.get("footprint", {})
    _reject_unknown(fp_doc, {"length", "width", "offset_x", "offset_y"}, "footprint")
    footprint = FootprintSpec(
        length=float(fp_doc.get("length", 2.4)),
        width=float(fp_doc.get("width", 0.8)),
        offset=Vec2(float(fp_doc.get("offset_x", 0.75)), float(fp_doc.get("offset_y", 0.0))),
    )

    adm_doc = doc.get("admittance", {})
    _reject_unknown(adm_doc, {"mass", "damping"}, "admittance")
    win_doc = doc.get("window", {})
    _reject_unknown(win_doc, {"length", "epsilon"}, "window")

    spec = ScenarioSpec(
        name=name,
        room=room,
        obstacles=obstacles,
        robot_start=robot_start,
        finish_offset=finish_offset,
        object_model=object_model,
        warning_params=warning_params,
        footprint=footprint,
        admittance_mass=float(adm_doc.get("mass", 12.0)),
        admittance_damping=float(adm_doc.get("damping", 150.0)),
        window_length=float(win_doc.get("length", 0.5)),
        window_epsilon=float(win_doc.get("epsilon", 1e-6)),
        timeout=float(doc.get("timeout", 90.0)),
    )
    _validate_start(spec)
    return spec


def _validate_start(spec: ScenarioSpec) -> None:
    from .geometry import polygons_intersect

    body = Polygon.rectangle(
        spec.robot_start.position, 0.8, 0.6, spec.robot_start.heading
    )
    for poly in spec.world_polygons():
        if polygons_intersect(body, poly):
            raise ScenarioError("robot start pose collides with the world")


def load_scenario(path: str | Path) -> ScenarioSpec:
    """Load and validate a scenario file; bare names resolve to bundled scenarios."""
    p = Path(path)
    if not p.exists() and p.suffix == "" and "/" not in str(path):
        return load_bundled(str(path))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"invalid YAML in {path}: {exc}") from exc
    return parse_scenario(doc, name=p.stem)


def bundled_scenario_names() -> list[str]:
    pkg = resources.files("cocarry") / "scenarios"
    return sorted(p.name[: -len(".yaml")] for p in pkg.iterdir() if p.name.endswith(".yaml"))


def load_bundled(name: str) -> ScenarioSpec:
    pkg = resources.files("cocarry") / "scenarios" / f"{name}.yaml"
    if not pkg.is_file():
        raise ScenarioError(
            f"unknown bundled scenario '{name}' (available: {', '.join(bundled_scenario_names())})"
        )
    return parse_scenario(yaml.safe_load(pkg.read_text()), name=name)
