"""Domain analytics: trajectory metrics, LiDAR scan interpretation,
log digestion, TF tree extraction, and image extraction."""

import math
from dataclasses import dataclass, field

from .decoding import decoded_stream
from .errors import (
    FewerThanTwoPoses,
    BadCondition,
    NoLogTopic,
    NoMessageWithinTolerance,
    NoScanNearTime,
    NoTfTopic,
    UnknownTopic,
    UnsupportedImageEncoding,
    UnsupportedPoseType,
)
from .rostime import ns_from_seconds
from .store import (
    DEFAULT_TOLERANCE_S,
    POSE_PATHS,
    Session,
    get_message_at_time,
    _stride_indices,
)

LOG_LEVELS = {"DEBUG": 1, "INFO": 2, "WARN": 4, "ERROR": 8, "FATAL": 16}
_LEVEL_NAMES = {v: k for k, v in LOG_LEVELS.items()}

# runs of obstacle beams separated by fewer invalid beams than this merge
OBSTACLE_BRIDGE_BEAMS = 3


def quaternion_yaw(q: dict) -> float:
    """Yaw from a quaternion dict; non-normalized inputs are normalized."""
    x, y, z, w = q["x"], q["y"], q["z"], q["w"]
    norm = math.sqrt(x * x + y * y + z * z + w * w)
    if norm > 0:
        x, y, z, w = x / norm, y / norm, z / norm, w / norm
    return math.atan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z))


# -- trajectory ------------------------------------------------------


@dataclass
class Waypoint:
    time_s: float
    x: float
    y: float
    heading: float


@dataclass
class TrajectoryReport:
    pose_topic: str
    start_time: float
    end_time: float
    duration: float
    message_count: int
    total_distance: float
    mean_speed: float
    max_speed: float
    x_min: float
    x_max: float
    x_span: float
    y_min: float
    y_max: float
    y_span: float
    displacement: float
    waypoints: list[Waypoint] | None = None
    method: str = "speeds derived from positional differences between poses"


def _pose_fields(type_name: str, topic: str) -> list[str]:
    path = POSE_PATHS.get(type_name)
    if path is None:
        raise UnsupportedPoseType(
            f"{topic} carries {type_name}; trajectory analysis needs "
            "nav_msgs/Odometry or geometry_msgs/PoseStamped"
        )
    return path


def analyze_trajectory(
    session: Session,
    pose_topic: str,
    start_time: float | None = None,
    end_time: float | None = None,
    include_waypoints: bool = False,
    waypoint_count: int = 20,
    bag_path: str | None = None,
) -> tuple[TrajectoryReport, str | None]:
    handle, note = session.open(bag_path)
    topics = handle.topics()
    if pose_topic not in topics:
        raise UnknownTopic(
            f"topic {pose_topic!r} is not in this bag; available topics: "
            f"{', '.join(sorted(topics))}"
        )
    pose_path = _pose_fields(topics[pose_topic][0].type_name, pose_topic)
    orient_path = pose_path[:-1] + ["orientation"]

    start_ns = None if start_time is None else ns_from_seconds(start_time)
    end_ns = None if end_time is None else ns_from_seconds(end_time)
    poses: list[tuple[int, float, float, float]] = []  # (t_ns, x, y, yaw)
    for msg in decoded_stream(handle, [pose_topic], start_ns, end_ns):
        pos = msg.value
        for seg in pose_path:
            pos = pos[seg]
        quat = msg.value
        for seg in orient_path:
            quat = quat[seg]
        poses.append((msg.time_ns, pos["x"], pos["y"], quaternion_yaw(quat)))

    if not poses:
        raise FewerThanTwoPoses(
            f"no poses on {pose_topic} in the requested window"
        )

    tns = [p[0] for p in poses]
    xs = [p[1] for p in poses]
    ys = [p[2] for p in poses]
    total = 0.0
    max_speed = 0.0
    for i in range(1, len(poses)):
        d = math.hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1])
        total += d
        # difference in integer ns: float-seconds subtraction loses
        # ~1e-7 s on epoch-scale stamps
        dt = (tns[i] - tns[i - 1]) / 1e9
        if dt > 0:
            max_speed = max(max_speed, d / dt)
    duration = (tns[-1] - tns[0]) / 1e9
    report = TrajectoryReport(
        pose_topic=pose_topic,
        start_time=tns[0] / 1e9,
        end_time=tns[-1] / 1e9,
        duration=duration,
        message_count=len(poses),
        total_distance=total,
        mean_speed=total / duration if duration > 0 else 0.0,
        max_speed=max_speed,
        x_min=min(xs), x_max=max(xs), x_span=max(xs) - min(xs),
        y_min=min(ys), y_max=max(ys), y_span=max(ys) - min(ys),
        displacement=math.hypot(xs[-1] - xs[0], ys[-1] - ys[0]),
    )
    if include_waypoints:
        report.waypoints = [
            Waypoint(poses[i][0] / 1e9, poses[i][1], poses[i][2], poses[i][3])
            for i in _stride_indices(len(poses), max(2, waypoint_count))
        ]
    return report, note


# -- laser scans -----------------------------------------------------


@dataclass
class ObstacleSector:
    start_angle: float
    end_angle: float
    min_range: float
    bearing_of_min: float
    beam_count: int


@dataclass
class GapSector:
    start_angle: float
    end_angle: float
    angular_width: float


@dataclass
class ScanReport:
    scan_topic: str
    time: float
    beam_count: int
    valid_count: int
    range_min_seen: float | None
    range_max_seen: float | None
    range_mean: float | None
    obstacles: list[ObstacleSector] = field(default_factory=list)
    gaps: list[GapSector] = field(default_factory=list)
    nearest: tuple[float, float] | None = None  # (range, bearing)
    angle_min: float = 0.0
    angle_increment: float = 0.0
    obstacle_threshold: float = 0.0
    gap_threshold: float = 0.0


def _runs(flags: list[bool]) -> list[tuple[int, int]]:
    """Maximal [start, end] index runs where flags is True."""
    runs = []
    start = None
    for i, on in enumerate(flags):
        if on and start is None:
            start = i
        elif not on and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(flags) - 1))
    return runs


def analyze_lidar_scan(
    session: Session,
    scan_topic: str,
    time: float,
    obstacle_threshold: float = 1.0,
    gap_threshold: float = 3.0,
    bag_path: str | None = None,
) -> tuple[ScanReport, str | None]:
    try:
        msg, actual, _, note = get_message_at_time(
            session, scan_topic, time, DEFAULT_TOLERANCE_S, bag_path
        )
    except NoMessageWithinTolerance as exc:
        raise NoScanNearTime(str(exc)) from None
    scan = msg.value
    if "ranges" not in scan or "angle_min" not in scan:
        raise BadCondition(
            f"{scan_topic} does not carry laser scans (no ranges field)"
        )
    ranges = scan["ranges"]
    n = len(ranges)
    angle_min = scan["angle_min"]
    inc = scan["angle_increment"]
    rmin, rmax = scan["range_min"], scan["range_max"]

    valid = [math.isfinite(r) and rmin <= r <= rmax for r in ranges]
    angle = lambda i: angle_min + i * inc  # noqa: E731

    obstacle_flags = [valid[i] and ranges[i] < obstacle_threshold for i in range(n)]
    runs = _runs(obstacle_flags)
    merged: list[tuple[int, int]] = []
    for run in runs:
        if merged:
            prev = merged[-1]
            between = range(prev[1] + 1, run[0])
            if (len(between) < OBSTACLE_BRIDGE_BEAMS
                    and all(not valid[j] for j in between)):
                merged[-1] = (prev[0], run[1])
                continue
        merged.append(run)
    obstacles = []
    for start, end in merged:
        beams = [i for i in range(start, end + 1) if obstacle_flags[i]]
        best = min(beams, key=lambda i: ranges[i])
        obstacles.append(ObstacleSector(
            angle(start), angle(end), ranges[best], angle(best), end - start + 1
        ))

    gap_flags = [
        (not valid[i]) or ranges[i] > gap_threshold for i in range(n)
    ]
    gaps = [
        GapSector(angle(start), angle(end), (end - start + 1) * inc)
        for start, end in _runs(gap_flags)
    ]

    valid_ranges = [(ranges[i], angle(i)) for i in range(n) if valid[i]]
    if valid_ranges:
        nearest = min(valid_ranges, key=lambda rb: rb[0])
        seen = [r for r, _ in valid_ranges]
        report = ScanReport(
            scan_topic, actual, n, len(valid_ranges),
            min(seen), max(seen), sum(seen) / len(seen),
            obstacles, gaps, nearest, angle_min, inc,
            obstacle_threshold, gap_threshold,
        )
    else:
        report = ScanReport(
            scan_topic, actual, n, 0, None, None, None,
            obstacles, gaps, None, angle_min, inc,
            obstacle_threshold, gap_threshold,
        )
    return report, note


# -- logs ------------------------------------------------------------


@dataclass
class LogEntry:
    time_s: float
    level: str
    node: str
    message: str


@dataclass
class LogReport:
    total: int
    by_level: dict[str, int]
    by_node: dict[str, int]
    entries: list[LogEntry]
    truncated: bool
    log_topics: list[str]


def _level_value(name: str) -> int:
    try:
        return LOG_LEVELS[name.upper()]
    except KeyError:
        raise BadCondition(
            f"unknown log level {name!r}; valid: {', '.join(LOG_LEVELS)}"
        ) from None


def analyze_logs(
    session: Session,
    level: str | None = None,
    node: str | None = None,
    start_time: float | None = None,
    end_time: float | None = None,
    limit: int = 50,
    bag_path: str | None = None,
) -> tuple[LogReport, str | None]:
    handle, note = session.open(bag_path)
    log_topics = sorted(
        topic for topic, conns in handle.topics().items()
        if any(c.type_name == "rosgraph_msgs/Log" for c in conns)
    )
    if not log_topics:
        raise NoLogTopic(
            "this bag has no log topic (/rosout or any rosgraph_msgs/Log topic)"
        )
    min_level = _level_value(level) if level else 0
    start_ns = None if start_time is None else ns_from_seconds(start_time)
    end_ns = None if end_time is None else ns_from_seconds(end_time)

    total = 0
    by_level: dict[str, int] = {name: 0 for name in LOG_LEVELS}
    by_node: dict[str, int] = {}
    entries: list[LogEntry] = []
    truncated = False
    for msg in decoded_stream(handle, log_topics, start_ns, end_ns):
        total += 1
        raw_level = msg.value.get("level", 0)
        name = _LEVEL_NAMES.get(raw_level, f"LEVEL_{raw_level}")
        by_level[name] = by_level.get(name, 0) + 1
        node_name = msg.value.get("name", "")
        by_node[node_name] = by_node.get(node_name, 0) + 1
        if raw_level >= min_level and (node is None or node_name == node):
            if len(entries) < limit:
                entries.append(LogEntry(
                    msg.time_s, name, node_name, msg.value.get("msg", "")
                ))
            else:
                truncated = True
    return LogReport(total, by_level, by_node, entries, truncated, log_topics), note


# -- TF tree ---------------------------------------------------------


@dataclass
class TfEdge:
    parent: str
    child: str
    static: bool
    translation: tuple[float, float, float]
    rotation: tuple[float, float, float, float]
    observation_count: int


@dataclass
class TfTree:
    frames: list[str]
    edges: list[TfEdge]
    roots: list[str]
    multi_parent: list[str]
    cycles: list[list[str]]


def get_tf_tree(
    session: Session,
    bag_path: str | None = None,
    sample_limit: int = 1000,
) -> tuple[TfTree, str | None]:
    handle, note = session.open(bag_path)
    tf_topics = sorted(
        topic for topic, conns in handle.topics().items()
        if any(c.type_name == "tf2_msgs/TFMessage" for c in conns)
    )
    if not tf_topics:
        raise NoTfTopic("this bag has no /tf or /tf_static topic")

    edges: dict[tuple[str, str], TfEdge] = {}
    seen_per_topic: dict[str, int] = {t: 0 for t in tf_topics}
    for msg in decoded_stream(handle, tf_topics):
        if seen_per_topic[msg.topic] >= sample_limit:
            if all(seen_per_topic[t] >= sample_limit for t in tf_topics):
                break
            continue
        seen_per_topic[msg.topic] += 1
        is_static = msg.topic == "/tf_static"
        for tr in msg.value.get("transforms", []):
            parent = tr["header"]["frame_id"]
            child = tr["child_frame_id"]
            t = tr["transform"]["translation"]
            q = tr["transform"]["rotation"]
            key = (parent, child)
            edge = edges.get(key)
            if edge is None:
                edges[key] = TfEdge(
                    parent, child, is_static,
                    (t["x"], t["y"], t["z"]),
                    (q["x"], q["y"], q["z"], q["w"]),
                    1,
                )
            else:
                edge.observation_count += 1
                edge.static = edge.static or is_static
                edge.translation = (t["x"], t["y"], t["z"])
                edge.rotation = (q["x"], q["y"], q["z"], q["w"])

    frames = sorted({f for key in edges for f in key})
    children = {child for _, child in edges}
    roots = sorted(f for f in frames if f not in children)
    parents_of: dict[str, set[str]] = {}
    for parent, child in edges:
        parents_of.setdefault(child, set()).add(parent)
    multi_parent = sorted(c for c, ps in parents_of.items() if len(ps) > 1)
    cycles = _find_cycles(edges)
    tree = TfTree(
        frames,
        [edges[k] for k in sorted(edges)],
        roots,
        multi_parent,
        cycles,
    )
    return tree, note


def _find_cycles(edges: dict[tuple[str, str], TfEdge]) -> list[list[str]]:
    adjacency: dict[str, list[str]] = {}
    for parent, child in sorted(edges):
        adjacency.setdefault(parent, []).append(child)
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    cycles: list[list[str]] = []

    def visit(node: str, stack: list[str]) -> None:
        color[node] = GRAY
        stack.append(node)
        for nxt in adjacency.get(node, ()):
            if color.get(nxt, WHITE) == GRAY:
                cycles.append(stack[stack.index(nxt):] + [nxt])
            elif color.get(nxt, WHITE) == WHITE:
                visit(nxt, stack)
        stack.pop()
        color[node] = BLACK

    for node in sorted({f for key in edges for f in key}):
        if color.get(node, WHITE) == WHITE:
            visit(node, [])
    return cycles


# -- images ----------------------------------------------------------

_FORMAT_MIME = (("jpeg", "image/jpeg"), ("jpg", "image/jpeg"), ("png", "image/png"))


@dataclass
class ImageContent:
    mime_type: str
    data: bytes
    actual_time: float
    topic: str
    format_field: str


def get_image_at_time(
    session: Session,
    image_topic: str,
    time: float,
    tolerance: float = DEFAULT_TOLERANCE_S,
    bag_path: str | None = None,
) -> tuple[ImageContent, str | None]:
    handle, note = session.open(bag_path)
    topics = handle.topics()
    if image_topic not in topics:
        raise UnknownTopic(
            f"topic {image_topic!r} is not in this bag; available topics: "
            f"{', '.join(sorted(topics))}"
        )
    type_name = topics[image_topic][0].type_name
    if type_name == "sensor_msgs/Image":
        raise UnsupportedImageEncoding(
            f"{image_topic} carries raw sensor_msgs/Image, which is not "
            "supported; only sensor_msgs/CompressedImage (JPEG/PNG "
            "passthrough) can be extracted"
        )
    if type_name != "sensor_msgs/CompressedImage":
        raise UnsupportedImageEncoding(
            f"{image_topic} carries {type_name}, not sensor_msgs/CompressedImage"
        )
    msg, actual, _, note2 = get_message_at_time(
        session, image_topic, time, tolerance, bag_path
    )
    fmt = str(msg.value.get("format", "")).lower()
    mime = next((m for key, m in _FORMAT_MIME if key in fmt), None)
    if mime is None:
        raise UnsupportedImageEncoding(
            f"image format {fmt!r} is not supported; expected jpeg or png"
        )
    return ImageContent(mime, msg.value["data"], actual, image_topic, fmt), note or note2
