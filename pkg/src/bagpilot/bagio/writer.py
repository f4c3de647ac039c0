"""Write ROS1 v2.0 bags.

Messages stream into uncompressed chunks capped at a target size; each
chunk is followed by its index-data records, and the trailing section
(connections + chunk infos) position is back-patched into the bag
header so readers can skip straight to it.
"""

import os
from pathlib import Path
from typing import BinaryIO, Iterable

from ..errors import IoFailure, UnknownConnection, UnsortedInput
from . import records as rec
from .types import ChunkSlot, ConnectionRecord, RawMessage, WrittenBagStats

DEFAULT_CHUNK_TARGET = 768 * 1024


def _connection_record_bytes(conn: ConnectionRecord) -> bytes:
    block = {
        "topic": conn.topic.encode("utf-8"),
        "type": conn.type_name.encode("utf-8"),
        "md5sum": conn.md5sum.encode("ascii"),
        "message_definition": conn.message_definition.encode("utf-8"),
    }
    if conn.callerid is not None:
        block["callerid"] = conn.callerid.encode("utf-8")
    if conn.latching is not None:
        block["latching"] = b"1" if conn.latching else b"0"
    data = rec.encode_header(block)
    header = rec.encode_header({
        "op": bytes([rec.OP_CONNECTION]),
        "conn": rec.u32(conn.conn_id),
        "topic": conn.topic.encode("utf-8"),
    })
    return rec.u32(len(header)) + header + rec.u32(len(data)) + data


def _message_record_bytes(msg: RawMessage) -> bytes:
    header = rec.encode_header({
        "op": bytes([rec.OP_MESSAGE_DATA]),
        "conn": rec.u32(msg.conn_id),
        "time": rec.encode_time(msg.time_ns),
    })
    return rec.u32(len(header)) + header + rec.u32(len(msg.payload)) + msg.payload


def _write_bag_header(f: BinaryIO, index_pos: int, conn_count: int, chunk_count: int) -> None:
    header = rec.encode_header({
        "op": bytes([rec.OP_BAG_HEADER]),
        "index_pos": rec.u64(index_pos),
        "conn_count": rec.u32(conn_count),
        "chunk_count": rec.u32(chunk_count),
    })
    pad = rec.BAG_HEADER_RECORD_SIZE - 8 - len(header)
    f.write(rec.u32(len(header)))
    f.write(header)
    f.write(rec.u32(pad))
    f.write(b" " * pad)


class _ChunkBuffer:
    def __init__(self) -> None:
        self.buf = bytearray()
        self.entries: dict[int, list[tuple[int, int]]] = {}
        self.start_ns: int | None = None
        self.end_ns: int | None = None

    def add(self, conn_bytes: bytes, msg_bytes: bytes, msg: RawMessage) -> None:
        self.buf += conn_bytes
        offset = len(self.buf)
        self.buf += msg_bytes
        self.entries.setdefault(msg.conn_id, []).append((msg.time_ns, offset))
        self.start_ns = msg.time_ns if self.start_ns is None else self.start_ns
        self.end_ns = msg.time_ns


def write_bag(
    path: str | os.PathLike,
    connections: Iterable[ConnectionRecord],
    messages: Iterable[RawMessage],
    chunk_target: int = DEFAULT_CHUNK_TARGET,
) -> WrittenBagStats:
    """Write a bag; messages must arrive sorted by time_ns."""
    conns = list(connections)
    conn_map = {c.conn_id: c for c in conns}
    path = Path(path)

    chunks: list[ChunkSlot] = []
    message_count = 0

    try:
        f = open(path, "wb")
    except OSError as exc:
        raise IoFailure(f"cannot create {path}: {exc}") from exc

    def flush(chunk: _ChunkBuffer) -> None:
        if not chunk.buf:
            return
        chunk_pos = f.tell()
        header = rec.encode_header({
            "op": bytes([rec.OP_CHUNK]),
            "compression": b"none",
            "size": rec.u32(len(chunk.buf)),
        })
        f.write(rec.u32(len(header)))
        f.write(header)
        f.write(rec.u32(len(chunk.buf)))
        f.write(chunk.buf)
        counts: dict[int, int] = {}
        for conn_id, pairs in chunk.entries.items():
            counts[conn_id] = len(pairs)
            data = b"".join(
                rec.encode_time(t) + rec.u32(off) for t, off in pairs
            )
            rec.write_record(
                f,
                {
                    "op": bytes([rec.OP_INDEX_DATA]),
                    "ver": rec.u32(1),
                    "conn": rec.u32(conn_id),
                    "count": rec.u32(len(pairs)),
                },
                data,
            )
        chunks.append(ChunkSlot(chunk_pos, chunk.start_ns or 0, chunk.end_ns or 0, counts))

    try:
        with f:
            f.write(rec.MAGIC)
            _write_bag_header(f, 0, 0, 0)

            chunk = _ChunkBuffer()
            conns_written: set[int] = set()
            prev_ns: int | None = None
            for msg in messages:
                conn = conn_map.get(msg.conn_id)
                if conn is None:
                    raise UnknownConnection(
                        f"message references unknown connection id {msg.conn_id}"
                    )
                if prev_ns is not None and msg.time_ns < prev_ns:
                    raise UnsortedInput(
                        f"message at {msg.time_ns} ns arrived after {prev_ns} ns"
                    )
                prev_ns = msg.time_ns
                conn_bytes = b""
                if msg.conn_id not in conns_written:
                    conns_written.add(msg.conn_id)
                    conn_bytes = _connection_record_bytes(conn)
                msg_bytes = _message_record_bytes(msg)
                added = len(conn_bytes) + len(msg_bytes)
                if chunk.buf and len(chunk.buf) + added > chunk_target:
                    flush(chunk)
                    chunk = _ChunkBuffer()
                chunk.add(conn_bytes, msg_bytes, msg)
                message_count += 1
            flush(chunk)

            index_pos = f.tell()
            for conn in conns:
                f.write(_connection_record_bytes(conn))
            for slot in chunks:
                data = b"".join(
                    rec.u32(cid) + rec.u32(n) for cid, n in slot.counts.items()
                )
                rec.write_record(
                    f,
                    {
                        "op": bytes([rec.OP_CHUNK_INFO]),
                        "ver": rec.u32(1),
                        "chunk_pos": rec.u64(slot.pos),
                        "start_time": rec.encode_time(slot.start_ns),
                        "end_time": rec.encode_time(slot.end_ns),
                        "count": rec.u32(len(slot.counts)),
                    },
                    data,
                )
            file_size = f.tell()
            f.seek(len(rec.MAGIC))
            _write_bag_header(f, index_pos, len(conns), len(chunks))
    except OSError as exc:
        raise IoFailure(f"failed writing {path}: {exc}") from exc

    return WrittenBagStats(message_count, len(chunks), file_size)
