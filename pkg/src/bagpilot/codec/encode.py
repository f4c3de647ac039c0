"""Serialize a value tree back to ROS1 wire bytes."""

import struct
from collections.abc import Mapping, Sequence

from ..errors import ShapeMismatch
from ..rostime import TimeVal
from .schema import VAR_ARRAY, FieldType, SchemaSet

_PACKERS = {
    "bool": struct.Struct("<?"),
    "int8": struct.Struct("<b"),
    "uint8": struct.Struct("<B"),
    "int16": struct.Struct("<h"),
    "uint16": struct.Struct("<H"),
    "int32": struct.Struct("<i"),
    "uint32": struct.Struct("<I"),
    "int64": struct.Struct("<q"),
    "uint64": struct.Struct("<Q"),
    "float32": struct.Struct("<f"),
    "float64": struct.Struct("<d"),
}
_U32 = struct.Struct("<I")
_TIME = struct.Struct("<II")


def _as_timeval(value, where: str) -> TimeVal:
    if isinstance(value, TimeVal):
        return value
    if isinstance(value, Mapping):
        try:
            return TimeVal(int(value["sec"]), int(value["nsec"]))
        except KeyError as exc:
            raise ShapeMismatch(f"{where}: time value missing {exc}") from None
    if isinstance(value, (tuple, list)) and len(value) == 2:
        return TimeVal(int(value[0]), int(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return TimeVal.from_seconds(float(value))
    raise ShapeMismatch(f"{where}: expected a time value, got {type(value).__name__}")


def _encode_scalar(base: str, value, out: bytearray, where: str) -> None:
    if base == "string":
        if not isinstance(value, str):
            raise ShapeMismatch(f"{where}: expected str, got {type(value).__name__}")
        raw = value.encode("utf-8")
        out += _U32.pack(len(raw))
        out += raw
        return
    if base in ("time", "duration"):
        tv = _as_timeval(value, where)
        try:
            out += _TIME.pack(tv.sec, tv.nsec)
        except struct.error as exc:
            raise ShapeMismatch(f"{where}: {exc}") from None
        return
    try:
        out += _PACKERS[base].pack(value)
    except (struct.error, TypeError) as exc:
        raise ShapeMismatch(f"{where}: cannot encode {value!r} as {base}: {exc}") from None


def _encode_field(
    schemas: SchemaSet, ftype: FieldType, value, out: bytearray, where: str
) -> None:
    if not ftype.is_array:
        if ftype.is_nested:
            _encode_record(schemas, ftype.base, value, out, where)
        else:
            _encode_scalar(ftype.base, value, out, where)
        return

    # uint8 arrays travel as bytes
    if ftype.base == "uint8" and not ftype.is_nested and isinstance(
        value, (bytes, bytearray, memoryview)
    ):
        data = bytes(value)
        if ftype.array_len == VAR_ARRAY:
            out += _U32.pack(len(data))
        elif len(data) != ftype.array_len:
            raise ShapeMismatch(
                f"{where}: expected {ftype.array_len} bytes, got {len(data)}"
            )
        out += data
        return

    if isinstance(value, (str, bytes)) or not isinstance(value, Sequence):
        raise ShapeMismatch(f"{where}: expected a sequence, got {type(value).__name__}")
    if ftype.array_len == VAR_ARRAY:
        out += _U32.pack(len(value))
    elif len(value) != ftype.array_len:
        raise ShapeMismatch(
            f"{where}: fixed array expects {ftype.array_len} elements, got {len(value)}"
        )
    for i, item in enumerate(value):
        if ftype.is_nested:
            _encode_record(schemas, ftype.base, item, out, f"{where}[{i}]")
        else:
            _encode_scalar(ftype.base, item, out, f"{where}[{i}]")


def _encode_record(
    schemas: SchemaSet, type_name: str, value, out: bytearray, where: str
) -> None:
    if not isinstance(value, Mapping):
        raise ShapeMismatch(
            f"{where}: expected a mapping for {type_name}, got {type(value).__name__}"
        )
    schema = schemas.get(type_name)
    field_names = {name for name, _ in schema.fields}
    extra = set(value) - field_names
    if extra:
        raise ShapeMismatch(f"{where}: unexpected fields {sorted(extra)} for {type_name}")
    for name, ftype in schema.fields:
        if name not in value:
            raise ShapeMismatch(f"{where}: missing field {name!r} for {type_name}")
        _encode_field(schemas, ftype, value[name], out, f"{where}.{name}" if where else name)


def encode(schemas: SchemaSet, value, type_name: str | None = None) -> bytes:
    """Encode a value tree for type_name (default: the root type)."""
    out = bytearray()
    _encode_record(schemas, type_name or schemas.root_type, value, out, "")
    return bytes(out)
