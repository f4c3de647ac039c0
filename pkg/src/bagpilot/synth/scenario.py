"""Scenario description for the synthetic differential-drive robot."""

import json
import math
import os
from dataclasses import asdict, dataclass, field

from ..errors import InvalidScenario

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Command:
    start_s: float
    end_s: float
    v: float
    omega: float


@dataclass(frozen=True)
class Obstacle:
    cx: float
    cy: float
    radius: float


@dataclass
class World:
    half_x: float = 6.0
    half_y: float = 6.0
    obstacles: list[Obstacle] = field(default_factory=list)


@dataclass
class ScanModel:
    beam_count: int = 360
    fov: float = TWO_PI
    range_min: float = 0.1
    range_max: float = 10.0

    @property
    def angle_increment(self) -> float:
        return self.fov / self.beam_count

    @property
    def angle_min(self) -> float:
        return -self.fov / 2.0


@dataclass(frozen=True)
class LogEvent:
    time_s: float
    level: str
    node: str
    text: str


@dataclass
class Scenario:
    duration: float
    seed: int = 0
    start_unix: float = 1_700_000_000.0
    odom_hz: float = 20.0
    cmd_hz: float = 10.0
    scan_hz: float = 5.0
    tf_hz: float = 20.0
    camera_hz: float = 0.0
    script: list[Command] = field(default_factory=list)
    world: World = field(default_factory=World)
    scan: ScanModel = field(default_factory=ScanModel)
    logs: list[LogEvent] = field(default_factory=list)
    noise_pose_sigma: float = 0.0
    noise_scan_sigma: float = 0.0

    def validate(self) -> None:
        if self.duration <= 0:
            raise InvalidScenario("duration must be positive")
        for hz in (self.odom_hz, self.cmd_hz, self.scan_hz, self.tf_hz, self.camera_hz):
            if hz < 0:
                raise InvalidScenario("topic rates must be non-negative")
        prev_end = None
        for cmd in sorted(self.script, key=lambda c: c.start_s):
            if cmd.start_s < 0 or cmd.end_s > self.duration + 1e-9:
                raise InvalidScenario(
                    f"command interval [{cmd.start_s}, {cmd.end_s}] outside "
                    f"[0, {self.duration}]"
                )
            if cmd.end_s <= cmd.start_s:
                raise InvalidScenario("command intervals must have positive length")
            if prev_end is not None and cmd.start_s < prev_end - 1e-9:
                raise InvalidScenario("command intervals must not overlap")
            prev_end = cmd.end_s
        for ob in self.world.obstacles:
            if ob.radius <= 0:
                raise InvalidScenario("obstacle radius must be positive")
            if (abs(ob.cx) + ob.radius > self.world.half_x
                    or abs(ob.cy) + ob.radius > self.world.half_y):
                raise InvalidScenario(
                    f"obstacle at ({ob.cx}, {ob.cy}) sticks out of the rectangle"
                )
        if self.scan.beam_count < 1:
            raise InvalidScenario("beam_count must be at least 1")

    def command_at(self, t: float) -> tuple[float, float]:
        """Active (v, omega) at time t; idle outside script intervals."""
        for cmd in self.script:
            if cmd.start_s <= t < cmd.end_s:
                return cmd.v, cmd.omega
        return 0.0, 0.0

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> "Scenario":
        try:
            world = obj.get("world", {})
            scan = obj.get("scan", {})
            scenario = cls(
                duration=float(obj["duration"]),
                seed=int(obj.get("seed", 0)),
                start_unix=float(obj.get("start_unix", 1_700_000_000.0)),
                odom_hz=float(obj.get("odom_hz", 20.0)),
                cmd_hz=float(obj.get("cmd_hz", 10.0)),
                scan_hz=float(obj.get("scan_hz", 5.0)),
                tf_hz=float(obj.get("tf_hz", 20.0)),
                camera_hz=float(obj.get("camera_hz", 0.0)),
                script=[Command(*map(float, row)) if isinstance(row, list)
                        else Command(**row) for row in obj.get("script", [])],
                world=World(
                    half_x=float(world.get("half_x", 6.0)),
                    half_y=float(world.get("half_y", 6.0)),
                    obstacles=[
                        Obstacle(*map(float, row)) if isinstance(row, list)
                        else Obstacle(**row)
                        for row in world.get("obstacles", [])
                    ],
                ),
                scan=ScanModel(
                    beam_count=int(scan.get("beam_count", 360)),
                    fov=float(scan.get("fov", TWO_PI)),
                    range_min=float(scan.get("range_min", 0.1)),
                    range_max=float(scan.get("range_max", 10.0)),
                ),
                logs=[LogEvent(float(row[0]), str(row[1]), str(row[2]), str(row[3]))
                      if isinstance(row, list) else LogEvent(**row)
                      for row in obj.get("logs", [])],
                noise_pose_sigma=float(obj.get("noise_pose_sigma", 0.0)),
                noise_scan_sigma=float(obj.get("noise_scan_sigma", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidScenario(f"bad scenario document: {exc}") from exc
        scenario.validate()
        return scenario

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "Scenario":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_json(json.load(f))
