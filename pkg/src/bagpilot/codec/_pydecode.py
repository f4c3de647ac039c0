"""Pure-Python decode-plan executor.

Fallback for environments where the compiled extension is not built.
Semantics must match bagpilot.codec._fastdecode exactly; the test
suite cross-checks the two on random payloads.
"""

import struct

from ..errors import ShortPayload
from ..rostime import TimeVal
from .plan import (
    OP_ARR_FIXED,
    OP_ARR_VAR,
    OP_BYTES_FIXED,
    OP_BYTES_VAR,
    OP_DURATION,
    OP_RECORD,
    OP_STRING,
    OP_TIME,
    SCALAR_SIZES,
    STRUCT_CODES,
)

BACKEND_NAME = "python"

_U32 = struct.Struct("<I")
_TIME = struct.Struct("<II")
_SCALARS = {op: struct.Struct("<" + code) for op, code in STRUCT_CODES.items()}


def _need(buf_len: int, pos: int, n: int) -> None:
    if pos + n > buf_len:
        raise ShortPayload(
            f"payload ended at byte {buf_len}, needed {pos + n}"
        )


def execute(plan: tuple, buf: bytes, pos: int, warnings: list) -> tuple:
    """Run one plan node at pos; returns (value, new_pos)."""
    op = plan[0]
    n_buf = len(buf)

    if op == OP_RECORD:
        record: dict = {}
        names, plans = plan[1], plan[2]
        for i, name in enumerate(names):
            record[name], pos = execute(plans[i], buf, pos, warnings)
        return record, pos

    if op == OP_STRING:
        _need(n_buf, pos, 4)
        (length,) = _U32.unpack_from(buf, pos)
        pos += 4
        _need(n_buf, pos, length)
        raw = buf[pos : pos + length]
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            text = raw.decode("utf-8", errors="replace")
            warnings.append(f"invalid UTF-8 in string field at byte {pos}")
        return text, pos + length

    if op in (OP_TIME, OP_DURATION):
        _need(n_buf, pos, 8)
        sec, nsec = _TIME.unpack_from(buf, pos)
        return TimeVal(sec, nsec), pos + 8

    if op == OP_BYTES_VAR:
        _need(n_buf, pos, 4)
        (length,) = _U32.unpack_from(buf, pos)
        pos += 4
        _need(n_buf, pos, length)
        return bytes(buf[pos : pos + length]), pos + length

    if op == OP_BYTES_FIXED:
        length = plan[1]
        _need(n_buf, pos, length)
        return bytes(buf[pos : pos + length]), pos + length

    if op == OP_ARR_FIXED or op == OP_ARR_VAR:
        if op == OP_ARR_VAR:
            _need(n_buf, pos, 4)
            (count,) = _U32.unpack_from(buf, pos)
            pos += 4
            elem = plan[1]
        else:
            count, elem = plan[1], plan[2]
        elem_op = elem[0]
        if elem_op in _SCALARS:
            size = SCALAR_SIZES[elem_op]
            _need(n_buf, pos, count * size)
            fmt = struct.Struct(f"<{count}{STRUCT_CODES[elem_op]}")
            values = list(fmt.unpack_from(buf, pos))
            return values, pos + count * size
        out = []
        for _ in range(count):
            value, pos = execute(elem, buf, pos, warnings)
            out.append(value)
        return out, pos

    # fixed-size scalar
    size = SCALAR_SIZES[op]
    _need(n_buf, pos, size)
    (value,) = _SCALARS[op].unpack_from(buf, pos)
    return value, pos + size
