"""The fifteen tools: descriptors, input schemas, and handlers.

Descriptions are one-liners; schemas carry per-field descriptions so
clients can generate forms and models can build valid argument sets.
Domain failures surface as isError tool results with self-describing
text, never as transport errors.
"""

import re
from dataclasses import dataclass
from typing import Callable

import jsonschema

from .. import analysis, codec, filterbag, plotting, store
from ..errors import BagpilotError
from .content import ToolResult, fail, ok, ok_with_image

Handler = Callable[[store.Session, dict], ToolResult]


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    input_schema: dict
    handler: Handler


def _schema(properties: dict, required: list[str]) -> dict:
    return {"type": "object", "properties": properties, "required": required}


_BAG_PATH_PROP = {
    "type": "string",
    "description": "Optional: specific bag file or directory to search",
}


# -- handlers --------------------------------------------------------


def _fmt(value: float, digits: int = 6) -> str:
    return f"{value:.{digits}f}".rstrip("0").rstrip(".")


def _note_lines(note: str | None) -> list[str]:
    return [f"note: {note}"] if note else []


def handle_set_bag_path(session: store.Session, args: dict) -> ToolResult:
    ack = session.set_bag_path(args["path"])
    lines = [f"kind: {ack['kind']}"]
    if "bag_count" in ack:
        lines.append(f"bag_count: {ack['bag_count']}")
    if "warning" in ack:
        lines.append(f"warning: {ack['warning']}")
    return ok(f"Bag path set to {ack['resolved']}", lines, ack)


def handle_list_bags(session: store.Session, args: dict) -> ToolResult:
    entries = store.list_bags(session, args.get("path"))
    lines = [
        f"{e.name}  {e.size_bytes} bytes  modified {e.modified_time:.3f}"
        for e in entries
    ]
    payload = {
        "count": len(entries),
        "bags": [
            {"name": e.name, "size_bytes": e.size_bytes,
             "modified_time": e.modified_time}
            for e in entries
        ],
    }
    return ok(f"Found {len(entries)} bag file(s)", lines, payload)


def handle_bag_info(session: store.Session, args: dict) -> ToolResult:
    summary, note = store.bag_info(session, args.get("bag_path"))
    lines = _note_lines(note) + [
        f"file_size: {summary.file_size} bytes",
        f"start_time: {summary.start_time}",
        f"end_time: {summary.end_time}",
        f"duration: {_fmt(summary.duration)} s",
        f"topics: {len(summary.topics)}",
    ]
    for t in summary.topics:
        lines.append(
            f"  {t.topic}  {t.type_name}  {t.message_count} msgs"
            f"  @ {t.mean_rate_hz:.2f} Hz"
        )
    payload = {
        "path": summary.path,
        "file_size": summary.file_size,
        "start_time": summary.start_time,
        "end_time": summary.end_time,
        "duration": summary.duration,
        "topics": [
            {"topic": t.topic, "type": t.type_name,
             "message_count": t.message_count, "mean_rate_hz": t.mean_rate_hz}
            for t in summary.topics
        ],
    }
    return ok(f"Bag info for {summary.path}", lines, payload)


def handle_get_message_at_time(session: store.Session, args: dict) -> ToolResult:
    msg, actual, delta, note = store.get_message_at_time(
        session, args["topic"], args["time"],
        args.get("tolerance", store.DEFAULT_TOLERANCE_S), args.get("bag_path"),
    )
    payload = {
        "topic": msg.topic,
        "type": msg.type_name,
        "requested_time": args["time"],
        "actual_time": actual,
        "delta_s": delta,
        "message": codec.display_value(msg.value),
    }
    lines = _note_lines(note) + [
        f"actual_time: {actual}",
        f"delta_s: {_fmt(delta, 9)}",
        f"type: {msg.type_name}",
    ]
    return ok(f"Message on {msg.topic} nearest t={args['time']}", lines, payload)


def handle_get_messages_in_range(session: store.Session, args: dict) -> ToolResult:
    result, note = store.get_messages_in_range(
        session, args["topic"], args["start_time"], args["end_time"],
        args.get("max_messages", 100), args.get("bag_path"),
    )
    lines = _note_lines(note) + [
        f"total_in_range: {result.total_in_range}",
        f"returned: {len(result.messages)}",
        f"truncated: {str(result.truncated).lower()}",
    ]
    if result.truncated:
        lines.append(
            "messages were sampled uniformly across the range; "
            "raise max_messages for more detail"
        )
    payload = {
        "topic": args["topic"],
        "start_time": args["start_time"],
        "end_time": args["end_time"],
        "total_in_range": result.total_in_range,
        "returned": len(result.messages),
        "truncated": result.truncated,
        "messages": [
            {"time": m.time_s, "value": codec.display_value(m.value)}
            for m in result.messages
        ],
    }
    return ok(
        f"{result.total_in_range} message(s) on {args['topic']} in "
        f"[{args['start_time']}, {args['end_time']}]",
        lines, payload,
    )


def handle_search_messages(session: store.Session, args: dict) -> ToolResult:
    result, note = store.search_messages(
        session, args["topic"], args["condition_type"], args["value"],
        args.get("field"), args.get("limit", 10),
        args.get("start_time"), args.get("end_time"), args.get("bag_path"),
    )
    lines = _note_lines(note) + [
        f"matches: {len(result.matches)}",
        f"scanned: {result.scanned}",
    ]
    payload: dict = {
        "topic": args["topic"],
        "condition_type": args["condition_type"],
        "value": args["value"],
        "matches": [],
        "scanned": result.scanned,
        "limit_hit": result.limit_hit,
    }
    if args.get("field"):
        payload["field"] = args["field"]
    for m in result.matches:
        entry: dict = {"time": m.time_s}
        if m.distance is not None:
            entry["distance"] = m.distance
            entry["position"] = m.field_value
        else:
            entry["field_value"] = m.field_value
        payload["matches"].append(entry)
    if result.closest is not None:
        c = result.closest
        lines.append(
            f"closest approach: {_fmt(c.distance, 3)} m at "
            f"({_fmt(c.x, 3)}, {_fmt(c.y, 3)}), t={c.time_s}"
        )
        payload["closest_approach"] = {
            "distance": c.distance, "x": c.x, "y": c.y, "time": c.time_s,
        }
    for m in result.matches[:10]:
        if m.distance is not None:
            lines.append(f"  t={m.time_s}  distance={_fmt(m.distance, 3)} m")
        else:
            lines.append(f"  t={m.time_s}  value={m.field_value}")
    return ok(
        f"Search on {args['topic']}: {len(result.matches)} match(es)",
        lines, payload,
    )


def handle_filter_bag(session: store.Session, args: dict) -> ToolResult:
    source, note = session.resolve_bag(args.get("bag_path"))
    topics = set(args["topics"]) if args.get("topics") else None
    report = filterbag.filter_bag(
        source, args["output_path"], topics,
        args.get("start_time"), args.get("end_time"), args.get("max_rate_hz"),
    )
    lines = _note_lines(note) + [
        f"source: {report.source}",
        f"destination: {report.destination}",
        f"messages: {report.total_in} in -> {report.total_out} out",
        f"output_size: {report.output_size} bytes",
        f"output_duration: {_fmt(report.output_duration)} s",
    ]
    for topic, (n_in, n_out) in sorted(report.per_topic.items()):
        lines.append(f"  {topic}: {n_in} -> {n_out}")
    payload = {
        "source": report.source,
        "destination": report.destination,
        "total_in": report.total_in,
        "total_out": report.total_out,
        "output_size": report.output_size,
        "output_duration": report.output_duration,
        "per_topic": {
            t: {"input_count": i, "output_count": o}
            for t, (i, o) in sorted(report.per_topic.items())
        },
    }
    return ok(f"Filtered bag written to {report.destination}", lines, payload)


def handle_analyze_trajectory(session: store.Session, args: dict) -> ToolResult:
    report, note = analysis.analyze_trajectory(
        session, args["pose_topic"], args.get("start_time"), args.get("end_time"),
        args.get("include_waypoints", False), args.get("waypoint_count", 20),
        args.get("bag_path"),
    )
    lines = _note_lines(note) + [
        f"messages: {report.message_count}",
        f"duration: {_fmt(report.duration)} s",
        f"total_distance: {_fmt(report.total_distance, 3)} m",
        f"mean_speed: {_fmt(report.mean_speed, 3)} m/s",
        f"max_speed: {_fmt(report.max_speed, 3)} m/s",
        f"displacement: {_fmt(report.displacement, 3)} m",
        f"X range: {_fmt(report.x_min, 3)} to {_fmt(report.x_max, 3)} meters "
        f"(total span: {_fmt(report.x_span, 3)} meters)",
        f"Y range: {_fmt(report.y_min, 3)} to {_fmt(report.y_max, 3)} meters "
        f"(total span: {_fmt(report.y_span, 3)} meters)",
        f"method: {report.method}",
    ]
    payload = {
        "pose_topic": report.pose_topic,
        "start_time": report.start_time,
        "end_time": report.end_time,
        "duration": report.duration,
        "message_count": report.message_count,
        "total_distance_m": report.total_distance,
        "mean_speed_mps": report.mean_speed,
        "max_speed_mps": report.max_speed,
        "x_min": report.x_min, "x_max": report.x_max, "x_span": report.x_span,
        "y_min": report.y_min, "y_max": report.y_max, "y_span": report.y_span,
        "displacement_m": report.displacement,
    }
    if report.waypoints is not None:
        payload["waypoints"] = [
            {"time": w.time_s, "x": w.x, "y": w.y, "heading": w.heading}
            for w in report.waypoints
        ]
        lines.append(f"waypoints: {len(report.waypoints)}")
    return ok(f"Trajectory analysis of {report.pose_topic}", lines, payload)


def handle_analyze_lidar_scan(session: store.Session, args: dict) -> ToolResult:
    report, note = analysis.analyze_lidar_scan(
        session, args["scan_topic"], args["time"],
        args.get("obstacle_threshold", 1.0), args.get("gap_threshold", 3.0),
        args.get("bag_path"),
    )
    lines = _note_lines(note) + [
        f"scan_time: {report.time}",
        f"beams: {report.beam_count} total, {report.valid_count} valid",
    ]
    if report.range_mean is not None:
        lines.append(
            f"ranges: min {_fmt(report.range_min_seen, 3)} m, "
            f"max {_fmt(report.range_max_seen, 3)} m, "
            f"mean {_fmt(report.range_mean, 3)} m"
        )
    lines.append(
        f"obstacles (range < {_fmt(report.obstacle_threshold, 2)} m): "
        f"{len(report.obstacles)}"
    )
    for i, ob in enumerate(report.obstacles, 1):
        lines.append(
            f"  {i}. bearings {_fmt(ob.start_angle, 3)}..{_fmt(ob.end_angle, 3)} rad, "
            f"min range {_fmt(ob.min_range, 3)} m at {_fmt(ob.bearing_of_min, 3)} rad"
        )
    lines.append(
        f"gaps (range > {_fmt(report.gap_threshold, 2)} m or no return): "
        f"{len(report.gaps)}"
    )
    if report.nearest is not None:
        lines.append(
            f"nearest return: {_fmt(report.nearest[0], 3)} m at "
            f"{_fmt(report.nearest[1], 3)} rad"
        )
    payload = {
        "scan_topic": report.scan_topic,
        "time": report.time,
        "beam_count": report.beam_count,
        "valid_count": report.valid_count,
        "range_min_seen": report.range_min_seen,
        "range_max_seen": report.range_max_seen,
        "range_mean": report.range_mean,
        "obstacle_threshold": report.obstacle_threshold,
        "gap_threshold": report.gap_threshold,
        "obstacles": [
            {"start_angle": o.start_angle, "end_angle": o.end_angle,
             "min_range": o.min_range, "bearing_of_min": o.bearing_of_min,
             "beam_count": o.beam_count}
            for o in report.obstacles
        ],
        "gaps": [
            {"start_angle": g.start_angle, "end_angle": g.end_angle,
             "angular_width": g.angular_width}
            for g in report.gaps
        ],
        "nearest": (
            {"range": report.nearest[0], "bearing": report.nearest[1]}
            if report.nearest else None
        ),
    }
    return ok(f"Laser scan analysis of {report.scan_topic}", lines, payload)


def handle_analyze_logs(session: store.Session, args: dict) -> ToolResult:
    report, note = analysis.analyze_logs(
        session, args.get("level"), args.get("node"),
        args.get("start_time"), args.get("end_time"),
        args.get("limit", 50), args.get("bag_path"),
    )
    lines = _note_lines(note) + [
        f"log_topics: {', '.join(report.log_topics)}",
        f"total: {report.total}",
        "by_level: " + ", ".join(
            f"{k}={v}" for k, v in report.by_level.items() if v
        ),
        f"filtered_entries: {len(report.entries)}"
        + (" (capped)" if report.truncated else ""),
    ]
    for e in report.entries[:20]:
        lines.append(f"  [{e.level}] t={e.time_s} {e.node}: {e.message}")
    payload = {
        "total": report.total,
        "by_level": report.by_level,
        "by_node": report.by_node,
        "truncated": report.truncated,
        "entries": [
            {"time": e.time_s, "level": e.level, "node": e.node,
             "message": e.message}
            for e in report.entries
        ],
    }
    return ok("Log analysis", lines, payload)


def handle_get_tf_tree(session: store.Session, args: dict) -> ToolResult:
    tree, note = analysis.get_tf_tree(
        session, args.get("bag_path"), args.get("sample_limit", 1000)
    )
    lines = _note_lines(note) + [
        f"frames ({len(tree.frames)}): {', '.join(tree.frames)}",
        f"roots: {', '.join(tree.roots) or '(none)'}",
        "edges:",
    ]
    for e in tree.edges:
        kind = "static" if e.static else "dynamic"
        lines.append(
            f"  {e.parent} -> {e.child} ({kind}, {e.observation_count} observations)"
        )
    if tree.multi_parent:
        lines.append(f"anomaly multi_parent: {', '.join(tree.multi_parent)}")
    if tree.cycles:
        lines.append(
            "anomaly cycles: " + "; ".join(" -> ".join(c) for c in tree.cycles)
        )
    payload = {
        "frames": tree.frames,
        "roots": tree.roots,
        "edges": [
            {"parent": e.parent, "child": e.child, "static": e.static,
             "translation": list(e.translation), "rotation": list(e.rotation),
             "observation_count": e.observation_count}
            for e in tree.edges
        ],
        "multi_parent": tree.multi_parent,
        "cycles": tree.cycles,
    }
    return ok("TF tree", lines, payload)


def handle_get_image_at_time(session: store.Session, args: dict) -> ToolResult:
    image, note = analysis.get_image_at_time(
        session, args["image_topic"], args["time"],
        args.get("tolerance", store.DEFAULT_TOLERANCE_S), args.get("bag_path"),
    )
    payload = {
        "topic": image.topic,
        "actual_time": image.actual_time,
        "mime_type": image.mime_type,
        "format": image.format_field,
        "bytes": len(image.data),
    }
    lines = _note_lines(note) + [
        f"actual_time: {image.actual_time}",
        f"mime_type: {image.mime_type}",
        f"bytes: {len(image.data)}",
    ]
    result = ok_with_image(
        f"Image from {image.topic}", lines, payload, image.data, image.mime_type
    )
    return result


def _plot_result_blocks(title: str, note: str | None,
                        result: plotting.PlotResult) -> ToolResult:
    lines = _note_lines(note)
    for s in result.series:
        if s.point_count == 0:
            lines.append(f"  {s.name}: empty")
        else:
            lines.append(
                f"  {s.name}: {s.point_count} pts, min {_fmt(s.min)}, "
                f"max {_fmt(s.max)}, mean {_fmt(s.mean)}"
            )
    for w in result.warnings:
        lines.append(f"warning: {w}")
    payload = {
        "width": result.width,
        "height": result.height,
        "series": [
            {"name": s.name, "point_count": s.point_count, "min": s.min,
             "max": s.max, "mean": s.mean,
             **({"histogram": s.histogram} if s.histogram else {})}
            for s in result.series
        ],
        "warnings": result.warnings,
        **result.extras,
    }
    return ok_with_image(title, lines, payload, result.png, result.mime_type)


def handle_plot_timeseries(session: store.Session, args: dict) -> ToolResult:
    result, note = plotting.plot_timeseries(
        session, args["fields"], args.get("style", "line"),
        args.get("start_time"), args.get("end_time"),
        args.get("title"), args.get("x_label"), args.get("y_label"),
        args.get("width", plotting.DEFAULT_WIDTH),
        args.get("height", plotting.DEFAULT_HEIGHT),
        args.get("bins", plotting.DEFAULT_BINS),
        args.get("bag_path"),
    )
    style = args.get("style", "line")
    kind = "histogram" if style == "histogram" else f"{style} time series"
    return _plot_result_blocks(
        f"I've created a {kind} plot of {len(args['fields'])} field(s).",
        note, result,
    )


def handle_plot_2d(session: store.Session, args: dict) -> ToolResult:
    result, note = plotting.plot_2d(
        session, args.get("pose_topic"), args.get("x_field"), args.get("y_field"),
        args.get("start_time"), args.get("end_time"),
        args.get("title"), args.get("x_label"), args.get("y_label"),
        args.get("width", plotting.DEFAULT_WIDTH),
        args.get("height", plotting.DEFAULT_HEIGHT),
        args.get("bag_path"),
    )
    what = args.get("pose_topic") or f"{args.get('x_field')} vs {args.get('y_field')}"
    return _plot_result_blocks(
        f"I've created a 2D trajectory plot of {what}.", note, result
    )


def handle_plot_lidar_scan(session: store.Session, args: dict) -> ToolResult:
    result, note = plotting.plot_lidar_scan(
        session, args["scan_topic"], args["time"], args.get("title"),
        args.get("width", plotting.DEFAULT_WIDTH),
        args.get("height", plotting.DEFAULT_HEIGHT),
        args.get("bag_path"),
    )
    return _plot_result_blocks(
        f"I've created a polar plot of the laser scan on {args['scan_topic']}.",
        note, result,
    )


# -- the fifteen tool descriptors ------------------------------------

TOOLS: list[ToolSpec] = [
    ToolSpec(
        "set_bag_path",
        "Set the path to a rosbag file or directory",
        _schema({
            "path": {
                "type": "string",
                "description": "Path to a rosbag file or a directory of bags",
            },
        }, ["path"]),
        handle_set_bag_path,
    ),
    ToolSpec(
        "list_bags",
        "List all available rosbag files in the directory",
        _schema({
            "path": {
                "type": "string",
                "description": "Optional: directory to list "
                               "(defaults to the configured path)",
            },
        }, []),
        handle_list_bags,
    ),
    ToolSpec(
        "bag_info",
        "Retrieve bag metadata: topics, counts, duration",
        _schema({"bag_path": _BAG_PATH_PROP}, []),
        handle_bag_info,
    ),
    ToolSpec(
        "get_message_at_time",
        "Get message from a topic at a specific timestamp",
        _schema({
            "topic": {"type": "string", "description": "ROS topic name"},
            "time": {
                "type": "number",
                "description": "Unix timestamp in seconds",
            },
            "tolerance": {
                "type": "number",
                "description": "Maximum |message time - time| in seconds "
                               "(default: 1.0)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["topic", "time"]),
        handle_get_message_at_time,
    ),
    ToolSpec(
        "get_messages_in_range",
        "Get all messages from a topic within a time range",
        # published field-for-field: names, descriptions, required list
        {
            "type": "object",
            "properties": {
                "topic": {
                    "type": "string",
                    "description": "ROS topic name",
                },
                "start_time": {
                    "type": "number",
                    "description": "Start unix timestamp in seconds",
                },
                "end_time": {
                    "type": "number",
                    "description": "End unix timestamp in seconds",
                },
                "max_messages": {
                    "type": "integer",
                    "description": "Maximum messages to return (default: 100)",
                },
                "bag_path": {
                    "type": "string",
                    "description": "Optional: specific bag file or directory "
                                   "to search",
                },
            },
            "required": ["topic", "start_time", "end_time"],
        },
        handle_get_messages_in_range,
    ),
    ToolSpec(
        "search_messages",
        "Search messages using conditions (regex, equals, etc.)",
        _schema({
            "topic": {"type": "string", "description": "ROS topic name"},
            "condition_type": {
                "type": "string",
                "enum": list(store.CONDITION_TYPES),
                "description": "Condition kind: equals, not_equals, "
                               "greater_than, less_than, contains, regex, "
                               "or near_position",
            },
            "value": {
                "type": "string",
                "description": "Comparison value; for near_position use "
                               "\"x,y,radius\" (e.g. \"2,-2,0.5\")",
            },
            "field": {
                "type": "string",
                "description": "Message field path (dot-separated), required "
                               "for every condition except near_position",
            },
            "limit": {
                "type": "integer",
                "description": "Maximum matches to return (default: 10)",
            },
            "start_time": {
                "type": "number",
                "description": "Optional: restrict to times >= this unix "
                               "timestamp in seconds",
            },
            "end_time": {
                "type": "number",
                "description": "Optional: restrict to times <= this unix "
                               "timestamp in seconds",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["topic", "condition_type", "value"]),
        handle_search_messages,
    ),
    ToolSpec(
        "filter_bag",
        "Create a filtered copy of a bag file by topic, time, or rate",
        _schema({
            "output_path": {
                "type": "string",
                "description": "Where to write the filtered bag "
                               "(must differ from the source)",
            },
            "topics": {
                "type": "array",
                "items": {"type": "string"},
                "description": "Optional: keep only these topics",
            },
            "start_time": {
                "type": "number",
                "description": "Optional: drop messages before this unix "
                               "timestamp in seconds",
            },
            "end_time": {
                "type": "number",
                "description": "Optional: drop messages after this unix "
                               "timestamp in seconds",
            },
            "max_rate_hz": {
                "type": "number",
                "description": "Optional: per-topic rate cap; keeps the "
                               "first message, then greedily keeps messages "
                               "at least 1/max_rate_hz apart",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["output_path"]),
        handle_filter_bag,
    ),
    ToolSpec(
        "analyze_trajectory",
        "Compute trajectory metrics (distance, speed, waypoints)",
        _schema({
            "pose_topic": {
                "type": "string",
                "description": "Topic carrying nav_msgs/Odometry or "
                               "geometry_msgs/PoseStamped",
            },
            "start_time": {
                "type": "number",
                "description": "Optional: window start, unix seconds",
            },
            "end_time": {
                "type": "number",
                "description": "Optional: window end, unix seconds",
            },
            "include_waypoints": {
                "type": "boolean",
                "description": "Include evenly spaced waypoints "
                               "(default: false)",
            },
            "waypoint_count": {
                "type": "integer",
                "description": "How many waypoints to include (default: 20)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["pose_topic"]),
        handle_analyze_trajectory,
    ),
    ToolSpec(
        "analyze_lidar_scan",
        "Analyze LiDAR scans for obstacles, gaps, statistics",
        _schema({
            "scan_topic": {
                "type": "string",
                "description": "Topic carrying sensor_msgs/LaserScan",
            },
            "time": {
                "type": "number",
                "description": "Unix timestamp in seconds; the nearest scan "
                               "is analyzed",
            },
            "obstacle_threshold": {
                "type": "number",
                "description": "Ranges below this many meters count as "
                               "obstacles (default: 1.0)",
            },
            "gap_threshold": {
                "type": "number",
                "description": "Ranges above this many meters (or missing "
                               "returns) count as gaps (default: 3.0)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["scan_topic", "time"]),
        handle_analyze_lidar_scan,
    ),
    ToolSpec(
        "analyze_logs",
        "Parse/analyze ROS logs; filter by level or node",
        _schema({
            "level": {
                "type": "string",
                "description": "Minimum severity to list: DEBUG, INFO, WARN, "
                               "ERROR, or FATAL",
            },
            "node": {
                "type": "string",
                "description": "Optional: only list entries from this node",
            },
            "start_time": {
                "type": "number",
                "description": "Optional: window start, unix seconds",
            },
            "end_time": {
                "type": "number",
                "description": "Optional: window end, unix seconds",
            },
            "limit": {
                "type": "integer",
                "description": "Maximum entries to list (default: 50)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, []),
        handle_analyze_logs,
    ),
    ToolSpec(
        "get_tf_tree",
        "Get TF tree of coordinate frame relationships",
        _schema({
            "sample_limit": {
                "type": "integer",
                "description": "Maximum messages to sample per tf topic "
                               "(default: 1000)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, []),
        handle_get_tf_tree,
    ),
    ToolSpec(
        "get_image_at_time",
        "Extract camera image at specific time (base64 JPEG)",
        _schema({
            "image_topic": {
                "type": "string",
                "description": "Topic carrying sensor_msgs/CompressedImage",
            },
            "time": {
                "type": "number",
                "description": "Unix timestamp in seconds; the nearest frame "
                               "is returned",
            },
            "tolerance": {
                "type": "number",
                "description": "Maximum |frame time - time| in seconds "
                               "(default: 1.0)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["image_topic", "time"]),
        handle_get_image_at_time,
    ),
    ToolSpec(
        "plot_timeseries",
        "Plot time series data with multiple styles",
        _schema({
            "fields": {
                "type": "array",
                "items": {"type": "string"},
                "description": "Topic-qualified field paths, e.g. "
                               "\"cmd_vel.linear.x\" or "
                               "\"odom.twist.twist.angular.z\"",
            },
            "style": {
                "type": "string",
                "enum": list(plotting.PLOT_STYLES),
                "description": "Plot style: line, scatter, step, or histogram "
                               "(default: line)",
            },
            "start_time": {
                "type": "number",
                "description": "Optional: window start, unix seconds",
            },
            "end_time": {
                "type": "number",
                "description": "Optional: window end, unix seconds",
            },
            "title": {"type": "string", "description": "Plot title"},
            "x_label": {"type": "string", "description": "X axis label"},
            "y_label": {"type": "string", "description": "Y axis label"},
            "width": {
                "type": "integer",
                "description": "Image width in pixels (default: 800)",
            },
            "height": {
                "type": "integer",
                "description": "Image height in pixels (default: 600)",
            },
            "bins": {
                "type": "integer",
                "description": "Histogram bin count (default: 30)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["fields"]),
        handle_plot_timeseries,
    ),
    ToolSpec(
        "plot_2d",
        "Create 2D trajectory plots (XY)",
        _schema({
            "pose_topic": {
                "type": "string",
                "description": "Topic carrying nav_msgs/Odometry or "
                               "geometry_msgs/PoseStamped",
            },
            "x_field": {
                "type": "string",
                "description": "Alternative to pose_topic: topic-qualified "
                               "numeric field for x",
            },
            "y_field": {
                "type": "string",
                "description": "Alternative to pose_topic: topic-qualified "
                               "numeric field for y",
            },
            "start_time": {
                "type": "number",
                "description": "Optional: window start, unix seconds",
            },
            "end_time": {
                "type": "number",
                "description": "Optional: window end, unix seconds",
            },
            "title": {"type": "string", "description": "Plot title"},
            "x_label": {"type": "string", "description": "X axis label"},
            "y_label": {"type": "string", "description": "Y axis label"},
            "width": {
                "type": "integer",
                "description": "Image width in pixels (default: 800)",
            },
            "height": {
                "type": "integer",
                "description": "Image height in pixels (default: 600)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, []),
        handle_plot_2d,
    ),
    ToolSpec(
        "plot_lidar_scan",
        "Visualize LiDAR scans as polar plots",
        _schema({
            "scan_topic": {
                "type": "string",
                "description": "Topic carrying sensor_msgs/LaserScan",
            },
            "time": {
                "type": "number",
                "description": "Unix timestamp in seconds; the nearest scan "
                               "is plotted",
            },
            "title": {"type": "string", "description": "Plot title"},
            "width": {
                "type": "integer",
                "description": "Image width in pixels (default: 800)",
            },
            "height": {
                "type": "integer",
                "description": "Image height in pixels (default: 600)",
            },
            "bag_path": _BAG_PATH_PROP,
        }, ["scan_topic", "time"]),
        handle_plot_lidar_scan,
    ),
]

TOOLS_BY_NAME: dict[str, ToolSpec] = {t.name: t for t in TOOLS}

TOOL_NAMES: list[str] = [t.name for t in TOOLS]


def descriptors() -> list[dict]:
    """The tools/list payload."""
    return [
        {"name": t.name, "description": t.description, "inputSchema": t.input_schema}
        for t in TOOLS
    ]


_REQUIRED_RE = re.compile(r"'(.+?)' is a required property")


def validate_arguments(tool: ToolSpec, args: dict) -> str | None:
    """Schema-check arguments; returns self-describing error text or None."""
    validator = jsonschema.Draft202012Validator(tool.input_schema)
    errors = sorted(validator.iter_errors(args), key=lambda e: list(e.path))
    if not errors:
        return None
    err = errors[0]
    if err.validator == "required":
        m = _REQUIRED_RE.search(err.message)
        name = m.group(1) if m else "?"
        expected = tool.input_schema["properties"].get(name, {}).get("type", "value")
        return (
            f"Invalid arguments for {tool.name}: missing required field "
            f"'{name}' (expected {expected})"
        )
    field = str(err.path[0]) if err.path else "(arguments)"
    return f"Invalid arguments for {tool.name}: field '{field}': {err.message}"


def call_tool(session: store.Session, name: str, arguments: dict) -> ToolResult:
    """Validate then dispatch; domain failures become isError results."""
    tool = TOOLS_BY_NAME[name]
    if not isinstance(arguments, dict):
        return fail(
            f"Invalid arguments for {name}: expected an object, got "
            f"{type(arguments).__name__}"
        )
    error = validate_arguments(tool, arguments)
    if error is not None:
        return fail(error)
    try:
        return tool.handler(session, arguments)
    except BagpilotError as exc:
        return fail(f"{name} failed: {exc}")
    except Exception as exc:  # noqa: BLE001 - surfaced to the caller
        return fail(f"{name} crashed unexpectedly: {exc!r}")
