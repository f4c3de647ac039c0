"""Open and stream ROS1 v2.0 bags.

Opening parses the bag header and loads the trailing index section;
when that section is absent (index_pos = 0) or malformed, a full
linear scan rebuilds the index and the handle is flagged `reindexed`.
Handles are immutable after open; each stream() call opens its own
file descriptor, so one handle can serve concurrent readers.
"""

import os
from bisect import bisect_left
from collections import OrderedDict
from heapq import merge
from pathlib import Path
from typing import BinaryIO, Iterable, Iterator

from ..errors import CorruptRecord, NotABag, Truncated, UnsupportedCompression
from . import records as rec
from .types import BagHeaderInfo, BagIndex, ChunkSlot, ConnectionRecord, IndexEntry, RawMessage

_CHUNK_CACHE_SLOTS = 2


def _parse_connection(header: dict[str, bytes], data: bytes) -> ConnectionRecord:
    conn_id = rec._U32.unpack(rec.require(header, "conn"))[0]
    outer_topic = rec.require(header, "topic").decode("utf-8")
    block = rec.decode_header(data)
    topic = block.get("topic", b"").decode("utf-8") or outer_topic
    type_name = rec.require(block, "type").decode("utf-8")
    md5sum = block.get("md5sum", b"*").decode("ascii")
    definition = block.get("message_definition", b"").decode("utf-8", errors="replace")
    callerid = block["callerid"].decode("utf-8") if "callerid" in block else None
    latching = (block["latching"] == b"1") if "latching" in block else None
    return ConnectionRecord(conn_id, topic, type_name, md5sum, definition, callerid, latching)


class BagHandle:
    """Read-only view of one bag file."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.info: BagHeaderInfo
        self.connections: list[ConnectionRecord] = []
        self.index = BagIndex()
        self.reindexed = False
        self._load()

    # -- construction ------------------------------------------------

    def _load(self) -> None:
        try:
            f = open(self.path, "rb")
        except OSError as exc:
            raise NotABag(f"cannot open {self.path}: {exc}") from exc
        with f:
            file_size = os.fstat(f.fileno()).st_size
            magic = f.read(len(rec.MAGIC))
            if magic != rec.MAGIC:
                raise NotABag(
                    f"{self.path} does not start with the bag magic line"
                )
            header, data_pos, data_len = rec.read_record_header_at(f, len(rec.MAGIC))
            if rec.header_op(header) != rec.OP_BAG_HEADER:
                raise CorruptRecord("first record is not a bag header")
            index_pos = rec._U64.unpack(rec.require(header, "index_pos"))[0]
            conn_count = rec._U32.unpack(rec.require(header, "conn_count"))[0]
            chunk_count = rec._U32.unpack(rec.require(header, "chunk_count"))[0]
            first_record_pos = data_pos + data_len
            self.info = BagHeaderInfo(index_pos, conn_count, chunk_count, file_size)

            if index_pos == 0:
                self._linear_scan(f, first_record_pos, file_size)
                self.reindexed = True
            else:
                try:
                    self._load_indexed(f, index_pos, conn_count, chunk_count)
                except (Truncated, CorruptRecord):
                    self.connections = []
                    self.index = BagIndex()
                    self._linear_scan(f, first_record_pos, file_size)
                    self.reindexed = True
        for entries in self.index.entries.values():
            entries.sort()

    def _load_indexed(
        self, f: BinaryIO, index_pos: int, conn_count: int, chunk_count: int
    ) -> None:
        pos = index_pos
        for _ in range(conn_count):
            header, data_pos, data_len = rec.read_record_header_at(f, pos)
            if rec.header_op(header) != rec.OP_CONNECTION:
                raise CorruptRecord("expected connection record in index section")
            self.connections.append(_parse_connection(header, f.read(data_len)))
            pos = data_pos + data_len
        for _ in range(chunk_count):
            header, data_pos, data_len = rec.read_record_header_at(f, pos)
            if rec.header_op(header) != rec.OP_CHUNK_INFO:
                raise CorruptRecord("expected chunk info record in index section")
            chunk_pos = rec._U64.unpack(rec.require(header, "chunk_pos"))[0]
            start_ns = rec.decode_time(rec.require(header, "start_time"))
            end_ns = rec.decode_time(rec.require(header, "end_time"))
            (n_conns,) = rec._U32.unpack(rec.require(header, "count"))
            data = f.read(data_len)
            if len(data) < data_len or data_len != n_conns * 8:
                raise CorruptRecord("chunk info data length mismatch")
            counts: dict[int, int] = {}
            for i in range(n_conns):
                (conn_id,) = rec._U32.unpack_from(data, 8 * i)
                (count,) = rec._U32.unpack_from(data, 8 * i + 4)
                counts[conn_id] = count
            self.index.chunks.append(ChunkSlot(chunk_pos, start_ns, end_ns, counts))
            pos = data_pos + data_len

        # per-chunk index data records sit right after each chunk record
        for slot in self.index.chunks:
            header, data_pos, data_len = rec.read_record_header_at(f, slot.pos)
            if rec.header_op(header) != rec.OP_CHUNK:
                raise CorruptRecord("chunk info points at a non-chunk record")
            self._check_compression(header)
            pos = data_pos + data_len
            for _ in range(len(slot.counts)):
                header, data_pos, data_len = rec.read_record_header_at(f, pos)
                if rec.header_op(header) != rec.OP_INDEX_DATA:
                    raise CorruptRecord("expected index data record after chunk")
                if rec._U32.unpack(rec.require(header, "ver"))[0] != 1:
                    raise CorruptRecord("unsupported index data version")
                (conn_id,) = rec._U32.unpack(rec.require(header, "conn"))
                (count,) = rec._U32.unpack(rec.require(header, "count"))
                data = f.read(data_len)
                if len(data) < data_len or data_len != count * 12:
                    raise CorruptRecord("index data length mismatch")
                entries = self.index.entries.setdefault(conn_id, [])
                for i in range(count):
                    time_ns = rec.decode_time(data[12 * i : 12 * i + 8])
                    (offset,) = rec._U32.unpack_from(data, 12 * i + 8)
                    entries.append(IndexEntry(time_ns, slot.pos, offset))
                pos = data_pos + data_len

    def _linear_scan(self, f: BinaryIO, start_pos: int, file_size: int) -> None:
        seen_conns: set[int] = set()
        pos = start_pos
        while pos < file_size:
            header, data_pos, data_len = rec.read_record_header_at(f, pos)
            if data_pos + data_len > file_size:
                raise Truncated(f"record at byte {pos} extends past end of file")
            op = rec.header_op(header)
            if op == rec.OP_CHUNK:
                self._check_compression(header)
                data = f.read(data_len)
                self._scan_chunk(pos, data, seen_conns)
            elif op == rec.OP_CONNECTION:
                conn = _parse_connection(header, f.read(data_len))
                if conn.conn_id not in seen_conns:
                    seen_conns.add(conn.conn_id)
                    self.connections.append(conn)
            pos = data_pos + data_len
        self.info = BagHeaderInfo(
            self.info.index_pos, len(self.connections),
            len(self.index.chunks), self.info.file_size,
        )

    def _scan_chunk(self, chunk_pos: int, data: bytes, seen_conns: set[int]) -> None:
        counts: dict[int, int] = {}
        start_ns = end_ns = None
        pos = 0
        while pos < len(data):
            record_start = pos
            header, payload, pos = rec.read_record(data, pos)
            op = rec.header_op(header)
            if op == rec.OP_MESSAGE_DATA:
                (conn_id,) = rec._U32.unpack(rec.require(header, "conn"))
                time_ns = rec.decode_time(rec.require(header, "time"))
                self.index.entries.setdefault(conn_id, []).append(
                    IndexEntry(time_ns, chunk_pos, record_start)
                )
                counts[conn_id] = counts.get(conn_id, 0) + 1
                start_ns = time_ns if start_ns is None else min(start_ns, time_ns)
                end_ns = time_ns if end_ns is None else max(end_ns, time_ns)
            elif op == rec.OP_CONNECTION:
                conn = _parse_connection(header, payload)
                if conn.conn_id not in seen_conns:
                    seen_conns.add(conn.conn_id)
                    self.connections.append(conn)
        self.index.chunks.append(
            ChunkSlot(chunk_pos, start_ns or 0, end_ns or 0, counts)
        )

    @staticmethod
    def _check_compression(header: dict[str, bytes]) -> None:
        compression = rec.require(header, "compression").decode("ascii")
        if compression != "none":
            raise UnsupportedCompression(
                f"chunk compression {compression!r} is not supported; "
                "only uncompressed bags can be read"
            )

    # -- queries -----------------------------------------------------

    @property
    def connections_by_id(self) -> dict[int, ConnectionRecord]:
        return {c.conn_id: c for c in self.connections}

    def topics(self) -> dict[str, list[ConnectionRecord]]:
        out: dict[str, list[ConnectionRecord]] = {}
        for conn in self.connections:
            out.setdefault(conn.topic, []).append(conn)
        return out

    def time_bounds_ns(self) -> tuple[int, int] | None:
        return self.index.time_bounds()

    def message_count(self, topic: str | None = None) -> int:
        if topic is None:
            return self.index.total_count()
        return sum(
            self.index.count_for(c.conn_id)
            for c in self.connections
            if c.topic == topic
        )

    def stream(
        self,
        topics: Iterable[str] | None = None,
        start_ns: int | None = None,
        end_ns: int | None = None,
    ) -> Iterator[tuple[ConnectionRecord, RawMessage]]:
        """Yield (connection, message) in non-decreasing time order.

        Ties are broken by (chunk position, offset). Unknown topics
        simply yield nothing.
        """
        wanted = None if topics is None else set(topics)
        by_id = self.connections_by_id
        selected: list[list[IndexEntry]] = []
        for conn in self.connections:
            if wanted is not None and conn.topic not in wanted:
                continue
            entries = self.index.entries.get(conn.conn_id, [])
            lo = 0 if start_ns is None else bisect_left(entries, (start_ns,))
            hi = len(entries) if end_ns is None else bisect_left(entries, (end_ns + 1,))
            if lo < hi:
                selected.append([
                    (e.time_ns, e.chunk_pos, e.offset, conn.conn_id)
                    for e in entries[lo:hi]
                ])
        if not selected:
            return
        cache: OrderedDict[int, bytes] = OrderedDict()
        with open(self.path, "rb") as f:
            for time_ns, chunk_pos, offset, conn_id in merge(*selected):
                data = cache.get(chunk_pos)
                if data is None:
                    data = self._read_chunk_data(f, chunk_pos)
                    cache[chunk_pos] = data
                    if len(cache) > _CHUNK_CACHE_SLOTS:
                        cache.popitem(last=False)
                header, payload, _ = rec.read_record(data, offset)
                if rec.header_op(header) != rec.OP_MESSAGE_DATA:
                    raise CorruptRecord(
                        f"index points at a non-message record in chunk {chunk_pos}"
                    )
                yield by_id[conn_id], RawMessage(conn_id, time_ns, payload)

    def _read_chunk_data(self, f: BinaryIO, chunk_pos: int) -> bytes:
        header, data_pos, data_len = rec.read_record_header_at(f, chunk_pos)
        if rec.header_op(header) != rec.OP_CHUNK:
            raise CorruptRecord(f"no chunk record at byte {chunk_pos}")
        self._check_compression(header)
        data = f.read(data_len)
        if len(data) < data_len:
            raise Truncated(f"chunk at byte {chunk_pos} extends past end of file")
        return data
