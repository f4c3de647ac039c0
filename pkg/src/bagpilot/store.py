"""Session state, bag discovery, and message retrieval.

The session remembers the configured bag path so follow-up tool calls
can omit it, and keeps a small LRU cache of open handles.
"""

import math
import re
from bisect import bisect_left
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

from .bagio import BAG_SUFFIXES, AnyBagHandle, open_bag
from .decoding import DecodedMessage, decoded_stream
from .errors import (
    BadCondition,
    FieldNotNumeric,
    InvalidRange,
    NoBagsInDirectory,
    NoMessageWithinTolerance,
    NoPathConfigured,
    PathNotFound,
    UnknownTopic,
    UnsupportedPoseType,
)
from . import codec
from .rostime import ns_from_seconds, seconds_from_ns

DEFAULT_TOLERANCE_S = 1.0
DEFAULT_CACHE_CAPACITY = 4

CONDITION_TYPES = (
    "equals", "not_equals", "greater_than", "less_than",
    "contains", "regex", "near_position",
)

# position field path per pose-bearing message type
POSE_PATHS = {
    "nav_msgs/Odometry": ["pose", "pose", "position"],
    "geometry_msgs/PoseStamped": ["pose", "position"],
}


def _bags_in(directory: Path) -> list[Path]:
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix in BAG_SUFFIXES
    )


class Session:
    """Per-server state: current path plus an open-handle LRU cache."""

    def __init__(self, initial_path: str | None = None,
                 cache_capacity: int = DEFAULT_CACHE_CAPACITY):
        self.current_path: Path | None = Path(initial_path) if initial_path else None
        self.cache_capacity = cache_capacity
        self._cache: OrderedDict[Path, tuple[tuple[int, int], AnyBagHandle]] = OrderedDict()

    def set_bag_path(self, path: str) -> dict:
        p = Path(path)
        if not p.exists():
            raise PathNotFound(f"path does not exist: {p}")
        self.current_path = p
        if p.is_dir():
            bags = _bags_in(p)
            ack = {"resolved": str(p.resolve()), "kind": "directory", "bag_count": len(bags)}
            if not bags:
                ack["warning"] = (
                    "directory contains no .bag or .jsonl files; path set anyway"
                )
            return ack
        return {"resolved": str(p.resolve()), "kind": "file"}

    def resolve_bag(self, bag_path: str | None = None) -> tuple[Path, str | None]:
        """Resolve the optional bag_path argument to a concrete file.

        Directories resolve to their most recently modified bag; the
        returned note says so (surfaced in tool responses).
        """
        base = Path(bag_path) if bag_path else self.current_path
        if base is None:
            raise NoPathConfigured(
                "no bag path configured; call set_bag_path with a bag file "
                "or directory first"
            )
        if not base.exists():
            raise PathNotFound(f"path does not exist: {base}")
        if base.is_file():
            return base, None
        bags = _bags_in(base)
        if not bags:
            raise NoBagsInDirectory(f"no .bag or .jsonl files in {base}")
        chosen = max(bags, key=lambda p: (p.stat().st_mtime_ns, p.name))
        return chosen, (
            f"{base} is a directory; using its most recently modified bag "
            f"{chosen.name}"
        )

    def open(self, bag_path: str | None = None) -> tuple[AnyBagHandle, str | None]:
        path, note = self.resolve_bag(bag_path)
        key = path.resolve()
        st = key.stat()
        stamp = (st.st_mtime_ns, st.st_size)
        cached = self._cache.get(key)
        if cached is not None and cached[0] == stamp:
            self._cache.move_to_end(key)
            return cached[1], note
        handle = open_bag(key)
        self._cache[key] = (stamp, handle)
        self._cache.move_to_end(key)
        while len(self._cache) > self.cache_capacity:
            self._cache.popitem(last=False)
        return handle, note


# -- bag listing / metadata ------------------------------------------


@dataclass
class BagEntry:
    name: str
    size_bytes: int
    modified_time: float


def list_bags(session: Session, path: str | None = None) -> list[BagEntry]:
    base = Path(path) if path else session.current_path
    if base is None:
        raise NoPathConfigured(
            "no path configured; call set_bag_path with a directory first"
        )
    if not base.exists():
        raise PathNotFound(f"path does not exist: {base}")
    if base.is_file():
        base = base.parent
    out = []
    for p in _bags_in(base):
        st = p.stat()
        out.append(BagEntry(p.name, st.st_size, st.st_mtime))
    return out


@dataclass
class TopicSummary:
    topic: str
    type_name: str
    message_count: int
    mean_rate_hz: float


@dataclass
class BagSummary:
    path: str
    file_size: int
    start_time: float
    end_time: float
    duration: float
    topics: list[TopicSummary] = field(default_factory=list)


def bag_info(session: Session, bag_path: str | None = None) -> tuple[BagSummary, str | None]:
    handle, note = session.open(bag_path)
    bounds = handle.time_bounds_ns()
    if bounds is None:
        start = end = duration = 0.0
    else:
        start = seconds_from_ns(bounds[0])
        end = seconds_from_ns(bounds[1])
        duration = (bounds[1] - bounds[0]) / 1e9
    summary = BagSummary(
        str(handle.path), handle.info.file_size, start, end, duration
    )
    for topic, conns in sorted(handle.topics().items()):
        count = sum(handle.index.count_for(c.conn_id) for c in conns)
        rate = count / duration if duration > 0 else 0.0
        summary.topics.append(TopicSummary(topic, conns[0].type_name, count, rate))
    return summary, note


# -- message retrieval -----------------------------------------------


def _require_topic(handle: AnyBagHandle, topic: str) -> None:
    topics = handle.topics()
    if topic not in topics:
        available = ", ".join(sorted(topics)) or "(none)"
        raise UnknownTopic(
            f"topic {topic!r} is not in this bag; available topics: {available}"
        )


def _topic_times(handle: AnyBagHandle, topic: str) -> list[int]:
    """Sorted message times (ns) across all connections of a topic."""
    times: list[int] = []
    for conn in handle.topics()[topic]:
        times.extend(e.time_ns for e in handle.index.entries.get(conn.conn_id, []))
    times.sort()
    return times


def get_message_at_time(
    session: Session,
    topic: str,
    time: float,
    tolerance: float = DEFAULT_TOLERANCE_S,
    bag_path: str | None = None,
) -> tuple[DecodedMessage, float, float, str | None]:
    """Message closest to `time`; ties go to the earlier message.

    Returns (message, actual_time_s, delta_s, note).
    """
    handle, note = session.open(bag_path)
    _require_topic(handle, topic)
    times = _topic_times(handle, topic)
    if not times:
        raise NoMessageWithinTolerance(f"topic {topic!r} has no messages")
    t_ns = ns_from_seconds(time)
    i = bisect_left(times, t_ns)
    best: int | None = None
    if i > 0:
        best = times[i - 1]
    if i < len(times):
        cand = times[i]
        if best is None or abs(cand - t_ns) < abs(best - t_ns):
            best = cand
    assert best is not None
    delta_ns = abs(best - t_ns)
    if delta_ns > ns_from_seconds(tolerance):
        raise NoMessageWithinTolerance(
            f"no message on {topic} within {tolerance} s of t={time}; "
            f"nearest is at t={seconds_from_ns(best)} "
            f"({delta_ns / 1e9:.3f} s away)"
        )
    msg = next(decoded_stream(handle, [topic], best, best))
    return msg, seconds_from_ns(best), delta_ns / 1e9, note


def _stride_indices(total: int, keep: int) -> list[int]:
    if keep >= total:
        return list(range(total))
    if keep <= 1:
        return [0]
    step = (total - 1) / (keep - 1)
    return [int(i * step + 0.5) for i in range(keep)]


@dataclass
class RangeResult:
    messages: list[DecodedMessage]
    total_in_range: int
    truncated: bool


def get_messages_in_range(
    session: Session,
    topic: str,
    start_time: float,
    end_time: float,
    max_messages: int = 100,
    bag_path: str | None = None,
) -> tuple[RangeResult, str | None]:
    """Inclusive time-range query, uniformly strided down to max_messages."""
    if start_time > end_time:
        raise InvalidRange(
            f"start_time {start_time} is after end_time {end_time}"
        )
    if max_messages < 1:
        raise InvalidRange("max_messages must be at least 1")
    handle, note = session.open(bag_path)
    _require_topic(handle, topic)
    start_ns, end_ns = ns_from_seconds(start_time), ns_from_seconds(end_time)
    times = _topic_times(handle, topic)
    lo = bisect_left(times, start_ns)
    hi = bisect_left(times, end_ns + 1)
    total = hi - lo
    keep = set(_stride_indices(total, max_messages))
    messages = [
        m for i, m in enumerate(decoded_stream(handle, [topic], start_ns, end_ns))
        if i in keep
    ]
    return RangeResult(messages, total, total > max_messages), note


# -- condition search ------------------------------------------------


@dataclass
class SearchMatch:
    time_s: float
    field_value: object
    distance: float | None = None


@dataclass
class ClosestApproach:
    distance: float
    x: float
    y: float
    time_s: float


@dataclass
class SearchResult:
    matches: list[SearchMatch]
    excerpts: list[dict]
    scanned: int
    limit_hit: bool
    closest: ClosestApproach | None = None


def _parse_near_position(value: str) -> tuple[float, float, float]:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 3:
        raise BadCondition(
            "near_position expects value \"x,y,radius\" "
            "(three comma-separated numbers), e.g. \"2,-2,0.5\""
        )
    try:
        x, y, r = (float(p) for p in parts)
    except ValueError:
        raise BadCondition(
            f"near_position value {value!r} is not three numbers \"x,y,radius\""
        ) from None
    if r < 0:
        raise BadCondition("near_position radius must be >= 0")
    return x, y, r


def _as_number(text: str, condition: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise BadCondition(
            f"condition {condition!r} needs a numeric value, got {text!r}"
        ) from None


def search_messages(
    session: Session,
    topic: str,
    condition_type: str,
    value: str,
    fieldpath: str | None = None,
    limit: int = 10,
    start_time: float | None = None,
    end_time: float | None = None,
    bag_path: str | None = None,
) -> tuple[SearchResult, str | None]:
    if condition_type not in CONDITION_TYPES:
        raise BadCondition(
            f"unknown condition_type {condition_type!r}; "
            f"valid: {', '.join(CONDITION_TYPES)}"
        )
    handle, note = session.open(bag_path)
    _require_topic(handle, topic)
    start_ns = None if start_time is None else ns_from_seconds(start_time)
    end_ns = None if end_time is None else ns_from_seconds(end_time)

    if condition_type == "near_position":
        result = _search_near_position(handle, topic, value, limit, start_ns, end_ns)
        return result, note

    if fieldpath is None:
        raise BadCondition(
            f"condition {condition_type!r} requires the 'field' parameter "
            "(dot-separated path, e.g. \"twist.twist.linear.x\")"
        )
    predicate = _scalar_predicate(condition_type, value)

    matches: list[SearchMatch] = []
    excerpts: list[dict] = []
    scanned = 0
    limit_hit = False
    for msg in decoded_stream(handle, [topic], start_ns, end_ns):
        scanned += 1
        field_value = codec.get_field(msg.value, fieldpath)
        if predicate(field_value):
            matches.append(SearchMatch(msg.time_s, field_value))
            excerpts.append(codec.display_value(msg.value))
            if len(matches) >= limit:
                limit_hit = True
                break
    return SearchResult(matches, excerpts, scanned, limit_hit), note


def _scalar_predicate(condition_type: str, value: str):
    if condition_type in ("greater_than", "less_than"):
        threshold = _as_number(value, condition_type)

        def ordered(v):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise FieldNotNumeric(
                    f"ordered comparison needs a numeric field, got "
                    f"{type(v).__name__}"
                )
            return v > threshold if condition_type == "greater_than" else v < threshold

        return ordered
    if condition_type in ("equals", "not_equals"):
        def equals(v):
            if isinstance(v, (int, float)) and not isinstance(v, bool):
                try:
                    same = v == float(value)
                except ValueError:
                    same = str(v) == value
            else:
                same = str(v) == value
            return same if condition_type == "equals" else not same

        return equals
    if condition_type == "contains":
        return lambda v: value in str(v)
    # regex
    try:
        pattern = re.compile(value)
    except re.error as exc:
        raise BadCondition(f"regex {value!r} does not compile: {exc}") from None
    return lambda v: pattern.search(str(v)) is not None


def _search_near_position(
    handle: AnyBagHandle,
    topic: str,
    value: str,
    limit: int,
    start_ns: int | None,
    end_ns: int | None,
) -> SearchResult:
    x0, y0, radius = _parse_near_position(value)
    conns = handle.topics()[topic]
    pose_path = POSE_PATHS.get(conns[0].type_name)
    if pose_path is None:
        raise UnsupportedPoseType(
            f"near_position needs a pose-bearing topic "
            f"(nav_msgs/Odometry or geometry_msgs/PoseStamped); "
            f"{topic} carries {conns[0].type_name}"
        )
    hits: list[tuple[float, SearchMatch, dict]] = []
    closest: ClosestApproach | None = None
    scanned = 0
    for msg in decoded_stream(handle, [topic], start_ns, end_ns):
        scanned += 1
        pos = codec.get_field(msg.value, pose_path)
        dist = math.hypot(pos["x"] - x0, pos["y"] - y0)
        if closest is None or dist < closest.distance:
            closest = ClosestApproach(dist, pos["x"], pos["y"], msg.time_s)
        if dist <= radius:
            match = SearchMatch(msg.time_s, {"x": pos["x"], "y": pos["y"]}, dist)
            hits.append((dist, match, codec.display_value(msg.value)))
    hits.sort(key=lambda h: h[0])
    kept = hits[:limit]
    return SearchResult(
        [m for _, m, _ in kept],
        [e for _, _, e in kept],
        scanned,
        len(hits) > limit,
        closest,
    )
