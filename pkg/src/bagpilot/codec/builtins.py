"""Built-in message types.

These are the standard ROS1 types the analysis tools consume. Each
entry carries the type's own definition block; full embedded texts
(with dependency blocks) are composed on demand, matching the layout
bags use. md5 sums are carried opaquely and never recomputed.
"""

from functools import lru_cache

from .schema import SchemaSet, parse_definition

_SEPARATOR = "=" * 80

_OWN_TEXT: dict[str, str] = {
    "std_msgs/Header": (
        "uint32 seq\n"
        "time stamp\n"
        "string frame_id\n"
    ),
    "geometry_msgs/Vector3": (
        "float64 x\n"
        "float64 y\n"
        "float64 z\n"
    ),
    "geometry_msgs/Point": (
        "float64 x\n"
        "float64 y\n"
        "float64 z\n"
    ),
    "geometry_msgs/Quaternion": (
        "float64 x\n"
        "float64 y\n"
        "float64 z\n"
        "float64 w\n"
    ),
    "geometry_msgs/Pose": (
        "geometry_msgs/Point position\n"
        "geometry_msgs/Quaternion orientation\n"
    ),
    "geometry_msgs/PoseWithCovariance": (
        "geometry_msgs/Pose pose\n"
        "float64[36] covariance\n"
    ),
    "geometry_msgs/Twist": (
        "geometry_msgs/Vector3 linear\n"
        "geometry_msgs/Vector3 angular\n"
    ),
    "geometry_msgs/TwistWithCovariance": (
        "geometry_msgs/Twist twist\n"
        "float64[36] covariance\n"
    ),
    "geometry_msgs/PoseStamped": (
        "std_msgs/Header header\n"
        "geometry_msgs/Pose pose\n"
    ),
    "geometry_msgs/TwistStamped": (
        "std_msgs/Header header\n"
        "geometry_msgs/Twist twist\n"
    ),
    "geometry_msgs/Transform": (
        "geometry_msgs/Vector3 translation\n"
        "geometry_msgs/Quaternion rotation\n"
    ),
    "geometry_msgs/TransformStamped": (
        "std_msgs/Header header\n"
        "string child_frame_id\n"
        "geometry_msgs/Transform transform\n"
    ),
    "nav_msgs/Odometry": (
        "std_msgs/Header header\n"
        "string child_frame_id\n"
        "geometry_msgs/PoseWithCovariance pose\n"
        "geometry_msgs/TwistWithCovariance twist\n"
    ),
    "sensor_msgs/LaserScan": (
        "std_msgs/Header header\n"
        "float32 angle_min\n"
        "float32 angle_max\n"
        "float32 angle_increment\n"
        "float32 time_increment\n"
        "float32 scan_time\n"
        "float32 range_min\n"
        "float32 range_max\n"
        "float32[] ranges\n"
        "float32[] intensities\n"
    ),
    "sensor_msgs/CompressedImage": (
        "std_msgs/Header header\n"
        "string format\n"
        "uint8[] data\n"
    ),
    "tf2_msgs/TFMessage": (
        "geometry_msgs/TransformStamped[] transforms\n"
    ),
    "rosgraph_msgs/Log": (
        "byte DEBUG=1\n"
        "byte INFO=2\n"
        "byte WARN=4\n"
        "byte ERROR=8\n"
        "byte FATAL=16\n"
        "std_msgs/Header header\n"
        "byte level\n"
        "string name\n"
        "string msg\n"
        "string[] topics\n"
        "string function\n"
        "string file\n"
        "uint32 line\n"
    ),
}

_DEPS: dict[str, tuple[str, ...]] = {
    "std_msgs/Header": (),
    "geometry_msgs/Vector3": (),
    "geometry_msgs/Point": (),
    "geometry_msgs/Quaternion": (),
    "geometry_msgs/Pose": ("geometry_msgs/Point", "geometry_msgs/Quaternion"),
    "geometry_msgs/PoseWithCovariance": ("geometry_msgs/Pose",),
    "geometry_msgs/Twist": ("geometry_msgs/Vector3",),
    "geometry_msgs/TwistWithCovariance": ("geometry_msgs/Twist",),
    "geometry_msgs/PoseStamped": ("std_msgs/Header", "geometry_msgs/Pose"),
    "geometry_msgs/TwistStamped": ("std_msgs/Header", "geometry_msgs/Twist"),
    "geometry_msgs/Transform": ("geometry_msgs/Vector3", "geometry_msgs/Quaternion"),
    "geometry_msgs/TransformStamped": ("std_msgs/Header", "geometry_msgs/Transform"),
    "nav_msgs/Odometry": (
        "std_msgs/Header",
        "geometry_msgs/PoseWithCovariance",
        "geometry_msgs/TwistWithCovariance",
    ),
    "sensor_msgs/LaserScan": ("std_msgs/Header",),
    "sensor_msgs/CompressedImage": ("std_msgs/Header",),
    "tf2_msgs/TFMessage": ("geometry_msgs/TransformStamped",),
    "rosgraph_msgs/Log": ("std_msgs/Header",),
}

# Carried into connection records verbatim; nothing recomputes or checks these.
MD5SUMS: dict[str, str] = {
    "std_msgs/Header": "2176decaecbce78abc3b96ef049fabed",
    "geometry_msgs/Vector3": "4a842b65f413084dc2b10fb484ea7f17",
    "geometry_msgs/Point": "4a842b65f413084dc2b10fb484ea7f17",
    "geometry_msgs/Quaternion": "a779879fadf0160734f906b8c19c7004",
    "geometry_msgs/Pose": "e45d45a5a1ce597b249e23fb30fc871f",
    "geometry_msgs/PoseWithCovariance": "c23e848cf1b7533a8d7c259073a97e6f",
    "geometry_msgs/Twist": "9f195f881246fdfa2798d1d3eebca84a",
    "geometry_msgs/TwistWithCovariance": "1fe8a28e6890a4cc3ae4c3ca5c7d82e6",
    "geometry_msgs/PoseStamped": "d3812c3cbc69362b77dc0b19b345f8f5",
    "geometry_msgs/TwistStamped": "98d34b0043a2093cf9d9345ab6eef12e",
    "geometry_msgs/Transform": "ac9eff44abf714214112b05d54a3cf9b",
    "geometry_msgs/TransformStamped": "b5764a33bfeb3588febc2682852579b0",
    "nav_msgs/Odometry": "cd5e73d190d741a2f92e81eda573aca7",
    "sensor_msgs/LaserScan": "90c7ef2dc6895d81024acba2ac42f369",
    "sensor_msgs/CompressedImage": "8f7a12909da2c9d3332d540a0977563f",
    "tf2_msgs/TFMessage": "94810edda583a504dfda3829e70d7eec",
    "rosgraph_msgs/Log": "acffd30cd6b6de30f120938c17c593fb",
}

BUILTIN_TYPES = frozenset(_OWN_TEXT)


def _all_deps(type_name: str) -> list[str]:
    ordered: list[str] = []
    seen: set[str] = set()

    def walk(name: str) -> None:
        for dep in _DEPS[name]:
            if dep not in seen:
                seen.add(dep)
                ordered.append(dep)
                walk(dep)

    walk(type_name)
    return ordered


@lru_cache(maxsize=None)
def full_definition(type_name: str) -> str:
    """Embedded definition text: own block plus all dependency blocks."""
    parts = [_OWN_TEXT[type_name]]
    for dep in _all_deps(type_name):
        parts.append(f"{_SEPARATOR}\nMSG: {dep}\n{_OWN_TEXT[dep]}")
    return "".join(parts)


@lru_cache(maxsize=None)
def builtin_schema(type_name: str) -> SchemaSet:
    return parse_definition(full_definition(type_name), type_name)


def md5sum(type_name: str) -> str:
    return MD5SUMS.get(type_name, "*")
