"""Conversions between decoded value trees and JSON-friendly forms."""

import base64
import math

from ..errors import ShapeMismatch
from ..rostime import TimeVal
from .schema import FieldType, SchemaSet


def to_jsonable(value, time_style: str = "seconds"):
    """Convert a decoded value tree to plain JSON types.

    time_style: "seconds" (float) or "pair" ({"sec","nsec"}).
    Bytes become {"b64": ...}. Non-finite floats survive only under
    Python's json (Infinity/NaN literals).
    """
    if isinstance(value, TimeVal):
        if time_style == "pair":
            return {"sec": value.sec, "nsec": value.nsec}
        return value.to_seconds()
    if isinstance(value, dict):
        return {k: to_jsonable(v, time_style) for k, v in value.items()}
    if isinstance(value, list):
        return [to_jsonable(v, time_style) for v in value]
    if isinstance(value, (bytes, bytearray)):
        return {"b64": base64.b64encode(bytes(value)).decode("ascii")}
    return value


def display_value(value, max_array: int = 24):
    """Compact rendering for tool responses: long arrays are summarized,
    bytes are reported by length, non-finite floats become strings."""
    if isinstance(value, TimeVal):
        return value.to_seconds()
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, dict):
        return {k: display_value(v, max_array) for k, v in value.items()}
    if isinstance(value, (bytes, bytearray)):
        return {"bytes": len(value)}
    if isinstance(value, list):
        if len(value) <= max_array:
            return [display_value(v, max_array) for v in value]
        summary: dict = {"length": len(value)}
        finite = [v for v in value if isinstance(v, (int, float))
                  and not isinstance(v, bool) and math.isfinite(v)]
        if finite:
            summary["min"] = min(finite)
            summary["max"] = max(finite)
        summary["first"] = [display_value(v, max_array) for v in value[:8]]
        return summary
    return value


def from_jsonable(schemas: SchemaSet, type_name: str, obj):
    """Rebuild a canonical value tree from JSON, guided by the schema.

    Used by the JSONL debug format so its values can be re-encoded to
    wire bytes and flow through the normal decode path.
    """
    return _record_from_json(schemas, type_name, obj)


def _record_from_json(schemas: SchemaSet, type_name: str, obj) -> dict:
    if not isinstance(obj, dict):
        raise ShapeMismatch(f"expected object for {type_name}, got {type(obj).__name__}")
    schema = schemas.get(type_name)
    out = {}
    for name, ftype in schema.fields:
        if name not in obj:
            raise ShapeMismatch(f"missing field {name!r} for {type_name}")
        out[name] = _field_from_json(schemas, ftype, obj[name])
    return out


def _field_from_json(schemas: SchemaSet, ftype: FieldType, obj):
    if ftype.is_array:
        if ftype.base == "uint8" and not ftype.is_nested:
            if isinstance(obj, str):
                return base64.b64decode(obj)
            if isinstance(obj, dict) and "b64" in obj:
                return base64.b64decode(obj["b64"])
            if isinstance(obj, list):
                return bytes(obj)
            raise ShapeMismatch("uint8 array expects base64 text or a byte list")
        if not isinstance(obj, list):
            raise ShapeMismatch(f"expected list for {ftype.base} array")
        elem = FieldType(ftype.base, ftype.is_nested, None)
        return [_field_from_json(schemas, elem, item) for item in obj]
    if ftype.is_nested:
        return _record_from_json(schemas, ftype.base, obj)
    if ftype.base in ("time", "duration"):
        if isinstance(obj, dict):
            return TimeVal(int(obj["sec"]), int(obj["nsec"]))
        if isinstance(obj, list) and len(obj) == 2:
            return TimeVal(int(obj[0]), int(obj[1]))
        return TimeVal.from_seconds(float(obj))
    return obj
