"""ROS1 bag v2.0 record grammar (little-endian throughout).

File = magic line, then records. Record = header_len:u32, header,
data_len:u32, data. Header = repeated fields, each field_len:u32 then
"name=" then value bytes.
"""

import struct
from typing import BinaryIO

from ..errors import CorruptRecord, Truncated

MAGIC = b"#ROSBAG V2.0\n"

OP_MESSAGE_DATA = 0x02
OP_BAG_HEADER = 0x03
OP_INDEX_DATA = 0x04
OP_CHUNK = 0x05
OP_CHUNK_INFO = 0x06
OP_CONNECTION = 0x07

BAG_HEADER_RECORD_SIZE = 4096

_U32 = struct.Struct("<I")
_U64 = struct.Struct("<Q")
_TIME = struct.Struct("<II")

NS_PER_S = 1_000_000_000


def u32(value: int) -> bytes:
    return _U32.pack(value)


def u64(value: int) -> bytes:
    return _U64.pack(value)


def encode_time(time_ns: int) -> bytes:
    return _TIME.pack(time_ns // NS_PER_S, time_ns % NS_PER_S)


def decode_time(raw: bytes) -> int:
    sec, nsec = _TIME.unpack(raw)
    return sec * NS_PER_S + nsec


def encode_header(fields: dict[str, bytes]) -> bytes:
    out = bytearray()
    for name, value in fields.items():
        entry = name.encode("ascii") + b"=" + value
        out += _U32.pack(len(entry))
        out += entry
    return bytes(out)


def decode_header(raw: bytes) -> dict[str, bytes]:
    fields: dict[str, bytes] = {}
    pos = 0
    end = len(raw)
    while pos < end:
        if pos + 4 > end:
            raise CorruptRecord("header field length runs past the header")
        (field_len,) = _U32.unpack_from(raw, pos)
        pos += 4
        if pos + field_len > end:
            raise CorruptRecord("header field runs past the header")
        entry = raw[pos : pos + field_len]
        pos += field_len
        eq = entry.find(b"=")
        if eq < 0:
            raise CorruptRecord(f"header field without '=': {entry[:40]!r}")
        fields[entry[:eq].decode("ascii")] = entry[eq + 1 :]
    return fields


def header_op(header: dict[str, bytes]) -> int:
    try:
        return header["op"][0]
    except (KeyError, IndexError):
        raise CorruptRecord("record header has no op field") from None


def require(header: dict[str, bytes], name: str) -> bytes:
    try:
        return header[name]
    except KeyError:
        raise CorruptRecord(f"record header missing mandatory field {name!r}") from None


def write_record(out: BinaryIO, fields: dict[str, bytes], data: bytes) -> int:
    """Append one record; returns the number of bytes written."""
    header = encode_header(fields)
    out.write(_U32.pack(len(header)))
    out.write(header)
    out.write(_U32.pack(len(data)))
    out.write(data)
    return 8 + len(header) + len(data)


def read_record(buf: bytes, pos: int) -> tuple[dict[str, bytes], bytes, int]:
    """Parse the record starting at pos in buf.

    Returns (header, data, next_pos). Raises Truncated if the record
    crosses the end of the buffer.
    """
    end = len(buf)
    if pos + 4 > end:
        raise Truncated(f"record header length at byte {pos} crosses end of data")
    (header_len,) = _U32.unpack_from(buf, pos)
    pos += 4
    if pos + header_len + 4 > end:
        raise Truncated(f"record header at byte {pos} crosses end of data")
    header = decode_header(buf[pos : pos + header_len])
    pos += header_len
    (data_len,) = _U32.unpack_from(buf, pos)
    pos += 4
    if pos + data_len > end:
        raise Truncated(f"record data at byte {pos} crosses end of data")
    return header, buf[pos : pos + data_len], pos + data_len


def read_record_header_at(f: BinaryIO, pos: int) -> tuple[dict[str, bytes], int, int]:
    """Read only the header of the record at file offset pos.

    Returns (header, data_pos, data_len) without loading the data.
    """
    f.seek(pos)
    raw = f.read(4)
    if len(raw) < 4:
        raise Truncated(f"record header length at byte {pos} crosses end of file")
    (header_len,) = _U32.unpack(raw)
    header_raw = f.read(header_len)
    if len(header_raw) < header_len:
        raise Truncated(f"record header at byte {pos} crosses end of file")
    header = decode_header(header_raw)
    raw = f.read(4)
    if len(raw) < 4:
        raise Truncated(f"record data length at byte {pos} crosses end of file")
    (data_len,) = _U32.unpack(raw)
    return header, pos + 8 + header_len, data_len
