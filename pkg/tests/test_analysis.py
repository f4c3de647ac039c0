"""Trajectory, lidar, log, TF, and image analytics against fixtures."""

import math
import random

import pytest

from bagpilot import codec
from bagpilot.analysis import (
    analyze_lidar_scan,
    analyze_logs,
    analyze_trajectory,
    get_image_at_time,
    get_tf_tree,
    quaternion_yaw,
)
from bagpilot.bagio import ConnectionRecord, RawMessage, write_bag
from bagpilot.errors import (
    FewerThanTwoPoses,
    NoLogTopic,
    NoScanNearTime,
    NoTfTopic,
    UnknownTopic,
    UnsupportedImageEncoding,
    UnsupportedPoseType,
)
from bagpilot.rostime import TimeVal
from bagpilot.store import Session
from bagpilot.synth import TINY_PNG, load_sidecar

ODOM_TYPE = "nav_msgs/Odometry"
SCAN_TYPE = "sensor_msgs/LaserScan"
TF_TYPE = "tf2_msgs/TFMessage"


def session_for(path) -> Session:
    s = Session()
    s.set_bag_path(str(path))
    return s


def odom_value(x, y, yaw=0.0, vx=0.0, wz=0.0):
    return {
        "header": {"seq": 0, "stamp": TimeVal(0, 0), "frame_id": "odom"},
        "child_frame_id": "base_link",
        "pose": {
            "pose": {
                "position": {"x": x, "y": y, "z": 0.0},
                "orientation": {"x": 0.0, "y": 0.0,
                                "z": math.sin(yaw / 2), "w": math.cos(yaw / 2)},
            },
            "covariance": [0.0] * 36,
        },
        "twist": {
            "twist": {"linear": {"x": vx, "y": 0.0, "z": 0.0},
                      "angular": {"x": 0.0, "y": 0.0, "z": wz}},
            "covariance": [0.0] * 36,
        },
    }


def write_odom_bag(path, poses):
    """poses: list of (time_ns, x, y, yaw)."""
    schemas = codec.builtin_schema(ODOM_TYPE)
    conn = ConnectionRecord(0, "/odom", ODOM_TYPE, "*",
                            codec.full_definition(ODOM_TYPE))
    msgs = [
        RawMessage(0, t, codec.encode(schemas, odom_value(x, y, yaw)))
        for t, x, y, yaw in poses
    ]
    write_bag(path, [conn], msgs)


def scan_value(ranges, angle_min=-math.pi, increment=2 * math.pi / 360,
               range_min=0.1, range_max=10.0):
    return {
        "header": {"seq": 0, "stamp": TimeVal(0, 0), "frame_id": "laser"},
        "angle_min": angle_min,
        "angle_max": angle_min + (len(ranges) - 1) * increment,
        "angle_increment": increment,
        "time_increment": 0.0,
        "scan_time": 0.1,
        "range_min": range_min,
        "range_max": range_max,
        "ranges": ranges,
        "intensities": [],
    }


def write_scan_bag(path, ranges_list):
    schemas = codec.builtin_schema(SCAN_TYPE)
    conn = ConnectionRecord(0, "/scan", SCAN_TYPE, "*",
                            codec.full_definition(SCAN_TYPE))
    msgs = [
        RawMessage(0, 1_000_000_000 * (i + 1), codec.encode(schemas, scan_value(r)))
        for i, r in enumerate(ranges_list)
    ]
    write_bag(path, [conn], msgs)


# -- trajectory ------------------------------------------------------


def test_straight_line_oracle(straight_bag):
    report, _ = analyze_trajectory(session_for(straight_bag), "/odom")
    assert report.total_distance == pytest.approx(5.0, rel=0.01)
    assert report.mean_speed == pytest.approx(0.5, rel=0.02)
    assert report.max_speed <= 0.55
    assert report.displacement == pytest.approx(5.0, rel=0.01)
    assert report.x_span == report.x_max - report.x_min


def test_circle_spans(circle_bag):
    report, _ = analyze_trajectory(session_for(circle_bag), "/odom")
    assert report.x_span == pytest.approx(4.0, abs=1e-3)
    assert report.y_span == pytest.approx(4.0, abs=1e-3)
    assert report.x_span == report.x_max - report.x_min
    assert report.y_span == report.y_max - report.y_min
    assert report.total_distance >= report.displacement >= 0


def test_trajectory_matches_sidecar(mixed_bag):
    truth = load_sidecar(mixed_bag)
    report, _ = analyze_trajectory(session_for(mixed_bag), "/odom")
    assert report.total_distance == pytest.approx(truth["total_distance_m"], rel=1e-9)
    assert report.max_speed == pytest.approx(truth["max_speed_mps"], rel=1e-6)
    assert report.x_span == pytest.approx(truth["x_span"], abs=1e-12)


def test_stationary_robot(pillar_bag):
    report, _ = analyze_trajectory(session_for(pillar_bag), "/odom")
    assert report.total_distance == 0.0
    assert report.mean_speed == 0.0
    assert report.displacement == 0.0


def test_trajectory_additivity(mixed_bag, straight_bag):
    s = session_for(mixed_bag)
    full, _ = analyze_trajectory(s, "/odom")
    t_mid = full.start_time + full.duration / 2
    # snap to an actual message time to make the split exact
    left, _ = analyze_trajectory(s, "/odom", end_time=t_mid)
    right, _ = analyze_trajectory(s, "/odom", start_time=left.end_time)
    assert left.total_distance + right.total_distance == pytest.approx(
        full.total_distance, abs=1e-9
    )


def test_trajectory_isometry(tmp_path, mixed_bag):
    from bagpilot.decoding import decoded_stream
    from bagpilot.bagio import open_bag
    handle = open_bag(mixed_bag)
    poses = []
    for m in decoded_stream(handle, ["/odom"]):
        p = m.value["pose"]["pose"]["position"]
        poses.append((m.time_ns, p["x"], p["y"], 0.0))
    theta = 1.234
    c, s = math.cos(theta), math.sin(theta)
    rotated = [
        (t, c * x - s * y, s * x + c * y, 0.0) for t, x, y, _ in poses
    ]
    path = tmp_path / "rotated.bag"
    write_odom_bag(path, rotated)
    base, _ = analyze_trajectory(session_for(mixed_bag), "/odom")
    rot, _ = analyze_trajectory(session_for(path), "/odom")
    assert rot.total_distance == pytest.approx(base.total_distance, abs=1e-9)
    assert rot.mean_speed == pytest.approx(base.mean_speed, abs=1e-9)
    assert rot.max_speed == pytest.approx(base.max_speed, abs=1e-9)
    xs = [x for _, x, _, _ in rotated]
    ys = [y for _, _, y, _ in rotated]
    assert rot.x_span == pytest.approx(max(xs) - min(xs), abs=1e-12)
    assert rot.y_span == pytest.approx(max(ys) - min(ys), abs=1e-12)


def test_waypoints_include_endpoints(mixed_bag):
    report, _ = analyze_trajectory(
        session_for(mixed_bag), "/odom", include_waypoints=True, waypoint_count=20
    )
    assert len(report.waypoints) == 20
    assert report.waypoints[0].time_s == report.start_time
    assert report.waypoints[-1].time_s == report.end_time


def test_single_pose_degenerates(tmp_path):
    path = tmp_path / "one.bag"
    write_odom_bag(path, [(1_000_000_000, 3.0, 4.0, 0.5)])
    report, _ = analyze_trajectory(session_for(path), "/odom")
    assert report.message_count == 1
    assert report.total_distance == 0.0
    assert report.duration == 0.0


def test_no_poses_in_window(mixed_bag):
    with pytest.raises(FewerThanTwoPoses):
        analyze_trajectory(session_for(mixed_bag), "/odom", start_time=0.0, end_time=1.0)


def test_unsupported_pose_type(mixed_bag):
    with pytest.raises(UnsupportedPoseType):
        analyze_trajectory(session_for(mixed_bag), "/cmd_vel")


def test_quaternion_yaw():
    assert quaternion_yaw({"x": 0, "y": 0, "z": 0, "w": 1}) == pytest.approx(0.0)
    yaw = 0.7
    q = {"x": 0, "y": 0, "z": math.sin(yaw / 2), "w": math.cos(yaw / 2)}
    assert quaternion_yaw(q) == pytest.approx(yaw)
    # non-normalized inputs are normalized first
    q2 = {k: 3.0 * v for k, v in q.items()}
    assert quaternion_yaw(q2) == pytest.approx(yaw)


# -- lidar -----------------------------------------------------------


def test_uniform_scan(tmp_path):
    path = tmp_path / "uniform.bag"
    write_scan_bag(path, [[5.0] * 360])
    report, _ = analyze_lidar_scan(session_for(path), "/scan", 1.0)
    assert report.valid_count == 360
    assert report.obstacles == []
    assert len(report.gaps) == 1
    gap = report.gaps[0]
    assert gap.angular_width == pytest.approx(2 * math.pi, rel=1e-6)
    assert report.range_min_seen == pytest.approx(5.0)
    assert report.range_max_seen == pytest.approx(5.0)


def test_pillar_scan_oracle(pillar_bag):
    report, _ = analyze_lidar_scan(session_for(pillar_bag), "/scan", 1_700_000_000.0)
    assert len(report.obstacles) == 1
    ob = report.obstacles[0]
    assert ob.min_range == pytest.approx(0.6, abs=1e-3)
    assert abs(ob.bearing_of_min) <= report.angle_increment + 1e-9
    assert report.nearest[0] == pytest.approx(ob.min_range)


def test_all_nan_scan(tmp_path):
    path = tmp_path / "nan.bag"
    write_scan_bag(path, [[float("nan")] * 90])
    report, _ = analyze_lidar_scan(session_for(path), "/scan", 1.0)
    assert report.valid_count == 0
    assert report.range_mean is None
    assert report.obstacles == []
    assert len(report.gaps) == 1
    assert report.nearest is None


def test_obstacle_bridging(tmp_path):
    nan = float("nan")
    base = [5.0] * 60
    # two obstacle runs separated by 2 invalid beams -> merged
    merged = base.copy()
    merged[10:13] = [0.5, 0.5, 0.5]
    merged[13:15] = [nan, nan]
    merged[15:17] = [0.5, 0.5]
    # separated by 3 invalid beams -> kept apart
    apart = base.copy()
    apart[10:13] = [0.5, 0.5, 0.5]
    apart[13:16] = [nan, nan, nan]
    apart[16:18] = [0.5, 0.5]
    # separated by a valid far beam -> kept apart
    far = base.copy()
    far[10:12] = [0.5, 0.5]
    far[12] = 5.0
    far[13:15] = [0.5, 0.5]
    path = tmp_path / "bridge.bag"
    write_scan_bag(path, [merged, apart, far])
    s = session_for(path)
    r1, _ = analyze_lidar_scan(s, "/scan", 1.0)
    r2, _ = analyze_lidar_scan(s, "/scan", 2.0)
    r3, _ = analyze_lidar_scan(s, "/scan", 3.0)
    assert len(r1.obstacles) == 1
    assert len(r2.obstacles) == 2
    assert len(r3.obstacles) == 2


def test_scan_partition_property(tmp_path, pillar_bag):
    rng = random.Random(4)
    ranges = [
        rng.choice([rng.uniform(0.2, 9.5), float("inf"), float("nan")])
        for _ in range(360)
    ]
    path = tmp_path / "random.bag"
    write_scan_bag(path, [ranges])
    report, _ = analyze_lidar_scan(session_for(path), "/scan", 1.0)
    inc = report.angle_increment

    def beams(start, end):
        i0 = round((start - report.angle_min) / inc)
        i1 = round((end - report.angle_min) / inc)
        return set(range(i0, i1 + 1))

    seen_obstacle: set[int] = set()
    for ob in report.obstacles:
        b = beams(ob.start_angle, ob.end_angle)
        assert not (b & seen_obstacle)
        seen_obstacle |= b
        assert ob.min_range < report.obstacle_threshold
    seen_gap: set[int] = set()
    for gap in report.gaps:
        b = beams(gap.start_angle, gap.end_angle)
        assert not (b & seen_gap)
        seen_gap |= b


def test_no_scan_near_time(pillar_bag):
    with pytest.raises(NoScanNearTime):
        analyze_lidar_scan(session_for(pillar_bag), "/scan", 42.0)


# -- logs ------------------------------------------------------------


def test_log_counts(mixed_bag):
    report, _ = analyze_logs(session_for(mixed_bag))
    assert report.total == 13
    assert report.by_level["INFO"] == 10
    assert report.by_level["WARN"] == 2
    assert report.by_level["ERROR"] == 1
    assert sum(report.by_level.values()) == report.total


def test_log_level_filter(mixed_bag):
    report, _ = analyze_logs(session_for(mixed_bag), level="WARN")
    assert report.total == 13
    assert len(report.entries) == 3
    assert {e.level for e in report.entries} == {"WARN", "ERROR"}


def test_log_node_filter_empty(mixed_bag):
    report, _ = analyze_logs(session_for(mixed_bag), node="phantom")
    assert report.total == 13
    assert report.entries == []


def test_log_empty_window(mixed_bag):
    report, _ = analyze_logs(session_for(mixed_bag), start_time=0.0, end_time=1.0)
    assert report.total == 0
    assert sum(report.by_level.values()) == 0
    assert report.entries == []


def test_log_limit_cap(mixed_bag):
    report, _ = analyze_logs(session_for(mixed_bag), limit=5)
    assert len(report.entries) == 5
    assert report.truncated


def test_no_log_topic(two_topic_bag):
    with pytest.raises(NoLogTopic):
        analyze_logs(session_for(two_topic_bag))


# -- tf tree ---------------------------------------------------------


def test_tf_tree(mixed_bag):
    tree, _ = get_tf_tree(session_for(mixed_bag))
    assert tree.frames == ["base_link", "laser", "odom"]
    assert tree.roots == ["odom"]
    assert len(tree.edges) == 2
    by_pair = {(e.parent, e.child): e for e in tree.edges}
    assert by_pair[("odom", "base_link")].static is False
    assert by_pair[("base_link", "laser")].static is True
    assert by_pair[("base_link", "laser")].observation_count == 1
    assert tree.multi_parent == []
    assert tree.cycles == []


def test_tf_determinism(mixed_bag):
    s = session_for(mixed_bag)
    t1, _ = get_tf_tree(s)
    t2, _ = get_tf_tree(s)
    assert t1 == t2


def test_no_tf_topic(two_topic_bag):
    with pytest.raises(NoTfTopic):
        get_tf_tree(session_for(two_topic_bag))


def tf_message(parent, child, t_ns):
    return {
        "transforms": [{
            "header": {"seq": 0, "stamp": TimeVal.from_ns(t_ns), "frame_id": parent},
            "child_frame_id": child,
            "transform": {
                "translation": {"x": 0.0, "y": 0.0, "z": 0.0},
                "rotation": {"x": 0.0, "y": 0.0, "z": 0.0, "w": 1.0},
            },
        }],
    }


def test_tf_multi_parent_anomaly(tmp_path):
    schemas = codec.builtin_schema(TF_TYPE)
    conn = ConnectionRecord(0, "/tf", TF_TYPE, "*", codec.full_definition(TF_TYPE))
    msgs = [
        RawMessage(0, 1, codec.encode(schemas, tf_message("odom", "base_link", 1))),
        RawMessage(0, 2, codec.encode(schemas, tf_message("map", "base_link", 2))),
    ]
    path = tmp_path / "anomaly.bag"
    write_bag(path, [conn], msgs)
    tree, _ = get_tf_tree(session_for(path))
    assert tree.multi_parent == ["base_link"]


def test_tf_cycle_anomaly(tmp_path):
    schemas = codec.builtin_schema(TF_TYPE)
    conn = ConnectionRecord(0, "/tf", TF_TYPE, "*", codec.full_definition(TF_TYPE))
    msgs = [
        RawMessage(0, 1, codec.encode(schemas, tf_message("a", "b", 1))),
        RawMessage(0, 2, codec.encode(schemas, tf_message("b", "a", 2))),
    ]
    path = tmp_path / "cycle.bag"
    write_bag(path, [conn], msgs)
    tree, _ = get_tf_tree(session_for(path))
    assert tree.cycles


# -- images ----------------------------------------------------------


def test_image_passthrough(mixed_bag):
    image, _ = get_image_at_time(
        session_for(mixed_bag), "/camera/image/compressed", 1_700_000_005.0
    )
    assert image.mime_type == "image/png"
    assert image.data == TINY_PNG
    assert image.data[:8] == b"\x89PNG\r\n\x1a\n"


def test_image_on_non_image_topic(mixed_bag):
    with pytest.raises(UnsupportedImageEncoding):
        get_image_at_time(session_for(mixed_bag), "/scan", 1_700_000_005.0)


def test_image_raw_type_rejected(tmp_path):
    conn = ConnectionRecord(0, "/camera/image_raw", "sensor_msgs/Image", "*", "")
    write_bag(tmp_path / "raw.bag", [conn], [RawMessage(0, 1, b"\x00")])
    with pytest.raises(UnsupportedImageEncoding) as exc:
        get_image_at_time(session_for(tmp_path / "raw.bag"), "/camera/image_raw", 0.0)
    assert "raw" in str(exc.value)


def test_image_near_end_returns_last(mixed_bag):
    truth = load_sidecar(mixed_bag)
    end = truth["last_time_s"]
    image, _ = get_image_at_time(
        session_for(mixed_bag), "/camera/image/compressed", end + 0.5
    )
    assert image.actual_time <= end + 1e-6


def test_image_unknown_topic(mixed_bag):
    with pytest.raises(UnknownTopic):
        get_image_at_time(session_for(mixed_bag), "/nope", 0.0)
