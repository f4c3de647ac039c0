"""Dot-separated field addressing on decoded values.

Error text is shown verbatim to the calling model, so failures name
the bad segment and list the fields that do exist.
"""

from ..errors import NoSuchField
from ..rostime import TimeVal


def split_path(path: str) -> list[str]:
    segments = [seg for seg in path.split(".") if seg]
    if not segments:
        raise NoSuchField("empty field path")
    return segments


def get_field(value, path: str | list[str]):
    """Resolve path on a decoded value.

    Numeric scalars come back as numbers, time values as fractional
    seconds. Array indexing is not supported; addressing into an array
    is an error that says so.
    """
    segments = split_path(path) if isinstance(path, str) else list(path)
    node = value
    walked: list[str] = []
    for seg in segments:
        if isinstance(node, dict):
            if seg not in node:
                where = ".".join(walked) or "message"
                raise NoSuchField(
                    f"no field {seg!r} under {where}; "
                    f"available fields: {', '.join(sorted(node))}"
                )
            node = node[seg]
        elif isinstance(node, (list, bytes)):
            where = ".".join(walked) or "message"
            raise NoSuchField(
                f"field {where!r} is an array; array indexing is not supported"
            )
        else:
            where = ".".join(walked) or "message"
            raise NoSuchField(
                f"field {where!r} is a scalar and has no subfield {seg!r}"
            )
        walked.append(seg)
    if isinstance(node, TimeVal):
        return node.to_seconds()
    return node


def get_numeric(value, path: str | list[str]) -> float:
    """Like get_field but requires a numeric scalar result."""
    node = get_field(value, path)
    if isinstance(node, bool):
        return float(node)
    if isinstance(node, (int, float)):
        return float(node)
    pathstr = path if isinstance(path, str) else ".".join(path)
    raise NoSuchField(
        f"field {pathstr!r} is not numeric (got {type(node).__name__})"
    )
