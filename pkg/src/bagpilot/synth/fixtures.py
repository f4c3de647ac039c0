"""Canned scenarios and fixture writing (bag + sidecar truth file)."""

import json
import math
from pathlib import Path

from .. import codec
from ..bagio import ConnectionRecord, RawMessage, WrittenBagStats, write_bag, write_jsonl
from .scenario import Command, LogEvent, Obstacle, Scenario, World
from .simulate import TOPIC_ORDER, TOPIC_TYPES, SimTrace, simulate


def straight_line() -> Scenario:
    """5 m straight run at 0.5 m/s over 10 s."""
    return Scenario(
        duration=10.0,
        script=[Command(0.0, 10.0, 0.5, 0.0)],
        logs=[
            LogEvent(0.5, "INFO", "planner", "starting straight run"),
            LogEvent(9.5, "INFO", "planner", "finished straight run"),
        ],
    )


def circle(radius: float = 2.0, speed: float = 0.5) -> Scenario:
    """One full circle of the given radius."""
    period = 2.0 * math.pi * radius / speed
    return Scenario(
        duration=period,
        script=[Command(0.0, period, speed, speed / radius)],
        scan_hz=2.0,
        logs=[LogEvent(1.0, "INFO", "planner", "driving a circle")],
    )


def pillar(distance: float = 0.8, radius: float = 0.2) -> Scenario:
    """Stationary robot staring at one pillar straight ahead."""
    return Scenario(
        duration=2.0,
        world=World(obstacles=[Obstacle(distance, 0.0, radius)]),
        logs=[LogEvent(0.1, "INFO", "perception", "watching the pillar")],
    )


def two_topic() -> Scenario:
    """Exactly two topics with 100 messages each (container tests)."""
    return Scenario(
        duration=4.95,
        odom_hz=20.0,
        cmd_hz=20.0,
        scan_hz=0.0,
        tf_hz=0.0,
    )


def mixed() -> Scenario:
    """General-purpose fixture: drive segments with turns, one pillar,
    a scripted log mix (10 INFO / 2 WARN / 1 ERROR), and camera frames."""
    turn = 0.656
    return Scenario(
        duration=30.0,
        camera_hz=1.0,
        script=[
            Command(0.0, 6.0, 0.5, 0.0),
            Command(6.0, 8.0, 0.3, turn),
            Command(8.0, 14.0, 0.5, 0.0),
            Command(14.0, 16.0, 0.3, -turn),
            Command(16.0, 22.0, 0.4, 0.0),
            Command(22.0, 24.0, 0.0, turn),
            Command(24.0, 30.0, 0.5, 0.0),
        ],
        world=World(obstacles=[Obstacle(2.0, -1.2, 0.3)]),
        logs=[
            LogEvent(0.2, "INFO", "planner", "mission started"),
            LogEvent(2.0, "INFO", "planner", "waypoint 1 reached"),
            LogEvent(5.0, "INFO", "controller", "cruise speed locked"),
            LogEvent(7.0, "INFO", "planner", "turning left"),
            LogEvent(9.0, "WARN", "controller", "tracking error above soft limit"),
            LogEvent(12.0, "INFO", "planner", "waypoint 2 reached"),
            LogEvent(15.0, "INFO", "planner", "turning right"),
            LogEvent(18.0, "INFO", "controller", "cruise speed locked"),
            LogEvent(21.0, "WARN", "controller", "battery below 50 percent"),
            LogEvent(23.0, "INFO", "planner", "rotating in place"),
            LogEvent(25.0, "ERROR", "safety", "bumper ghost trigger, ignored"),
            LogEvent(27.0, "INFO", "planner", "final leg"),
            LogEvent(29.5, "INFO", "planner", "mission complete"),
        ],
    )


CANNED = {
    "straight_line": straight_line,
    "circle": circle,
    "pillar": pillar,
    "two_topic": two_topic,
    "mixed": mixed,
}


def trace_connections(trace: SimTrace) -> list[ConnectionRecord]:
    conns = []
    for topic in TOPIC_ORDER:
        if not trace.messages.get(topic):
            continue
        type_name = TOPIC_TYPES[topic]
        conns.append(ConnectionRecord(
            conn_id=len(conns),
            topic=topic,
            type_name=type_name,
            md5sum=codec.md5sum(type_name),
            message_definition=codec.full_definition(type_name),
            latching=True if topic == "/tf_static" else None,
        ))
    return conns


def trace_raw_messages(trace: SimTrace, conns: list[ConnectionRecord]):
    """Encode and merge all topics into one time-sorted message stream."""
    conn_by_topic = {c.topic: c for c in conns}
    rows = []
    for order, topic in enumerate(TOPIC_ORDER):
        conn = conn_by_topic.get(topic)
        if conn is None:
            continue
        schemas = codec.builtin_schema(conn.type_name)
        for time_ns, value in trace.messages[topic]:
            rows.append((time_ns, order, conn.conn_id, schemas, value))
    rows.sort(key=lambda r: (r[0], r[1]))
    for time_ns, _, conn_id, schemas, value in rows:
        yield RawMessage(conn_id, time_ns, codec.encode(schemas, value))


def sidecar_path(bag_path: str | Path) -> Path:
    return Path(bag_path).with_suffix(".truth.json")


def write_fixture(trace: SimTrace, path: str | Path) -> WrittenBagStats:
    """Write the trace as a bag plus a sidecar truth JSON next to it."""
    path = Path(path)
    conns = trace_connections(trace)
    stats = write_bag(path, conns, trace_raw_messages(trace, conns))
    with open(sidecar_path(path), "w", encoding="utf-8") as f:
        json.dump(trace.summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return stats


def write_jsonl_fixture(trace: SimTrace, path: str | Path) -> int:
    """Write the trace in the JSONL debug format."""
    rows = []
    for order, topic in enumerate(TOPIC_ORDER):
        for time_ns, value in trace.messages.get(topic, []):
            rows.append((time_ns, order, topic, value))
    rows.sort(key=lambda r: (r[0], r[1]))
    return write_jsonl(path, (
        (topic, TOPIC_TYPES[topic], time_ns,
         codec.to_jsonable(value, time_style="pair"))
        for time_ns, _, topic, value in rows
    ))


def load_sidecar(bag_path: str | Path) -> dict:
    with open(sidecar_path(bag_path), "r", encoding="utf-8") as f:
        return json.load(f)


def generate(name_or_scenario: str | Scenario, out_path: str | Path) -> WrittenBagStats:
    """Simulate and write a fixture in one call."""
    if isinstance(name_or_scenario, Scenario):
        scenario = name_or_scenario
    else:
        scenario = CANNED[name_or_scenario]()
    return write_fixture(simulate(scenario), out_path)
