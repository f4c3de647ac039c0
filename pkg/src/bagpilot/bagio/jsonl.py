"""JSONL debug sidecar format.

One JSON object per line: {"topic", "type", "time_ns", "value"}. Known
message types are re-encoded to wire bytes at load time so a JSONL
file behaves exactly like a bag through the same handle interface;
unknown types stay countable but undecodable (empty definition).
"""

import json
import os
from pathlib import Path
from typing import Iterable, Iterator

from .. import codec
from ..errors import CorruptRecord
from .types import BagHeaderInfo, BagIndex, ConnectionRecord, IndexEntry, RawMessage


class JsonlBagHandle:
    """In-memory handle over a JSONL debug file; mirrors BagHandle."""

    def __init__(self, path: str | os.PathLike):
        self.path = Path(path)
        self.connections: list[ConnectionRecord] = []
        self.index = BagIndex()
        self.reindexed = False
        self._messages: list[RawMessage] = []
        self._load()

    def _load(self) -> None:
        conn_ids: dict[tuple[str, str], int] = {}
        rows: list[tuple[int, int, bytes]] = []
        with open(self.path, "r", encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    topic = obj["topic"]
                    type_name = obj["type"]
                    time_ns = int(obj["time_ns"])
                    value = obj["value"]
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise CorruptRecord(f"{self.path}:{lineno}: bad JSONL row: {exc}") from exc
                key = (topic, type_name)
                if key not in conn_ids:
                    conn_ids[key] = len(conn_ids)
                    if type_name in codec.BUILTIN_TYPES:
                        definition = codec.full_definition(type_name)
                        md5 = codec.md5sum(type_name)
                    else:
                        definition, md5 = "", "*"
                    self.connections.append(ConnectionRecord(
                        conn_ids[key], topic, type_name, md5, definition,
                    ))
                payload = b""
                if type_name in codec.BUILTIN_TYPES:
                    schemas = codec.builtin_schema(type_name)
                    payload = codec.encode(
                        schemas, codec.from_jsonable(schemas, type_name, value)
                    )
                rows.append((conn_ids[key], time_ns, payload))

        order = sorted(range(len(rows)), key=lambda i: (rows[i][1], i))
        for slot, i in enumerate(order):
            conn_id, time_ns, payload = rows[i]
            self._messages.append(RawMessage(conn_id, time_ns, payload))
            self.index.entries.setdefault(conn_id, []).append(
                IndexEntry(time_ns, 0, slot)
            )
        for entries in self.index.entries.values():
            entries.sort()
        self.info = BagHeaderInfo(
            0, len(self.connections), 0, os.path.getsize(self.path)
        )

    # same query surface as BagHandle
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
        wanted = None if topics is None else set(topics)
        by_id = self.connections_by_id
        for msg in self._messages:
            conn = by_id[msg.conn_id]
            if wanted is not None and conn.topic not in wanted:
                continue
            if start_ns is not None and msg.time_ns < start_ns:
                continue
            if end_ns is not None and msg.time_ns > end_ns:
                continue
            yield conn, msg


def write_jsonl(
    path: str | os.PathLike,
    rows: Iterable[tuple[str, str, int, object]],
) -> int:
    """Write (topic, type, time_ns, jsonable value) rows; returns count."""
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for topic, type_name, time_ns, value in rows:
            f.write(json.dumps(
                {"topic": topic, "type": type_name, "time_ns": time_ns, "value": value},
                separators=(",", ":"),
            ))
            f.write("\n")
            n += 1
    return n
