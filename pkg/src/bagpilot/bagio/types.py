"""Container-level data types shared by the reader and writer."""

from dataclasses import dataclass, field
from typing import NamedTuple


@dataclass(frozen=True)
class BagHeaderInfo:
    index_pos: int
    conn_count: int
    chunk_count: int
    file_size: int


@dataclass
class ConnectionRecord:
    conn_id: int
    topic: str
    type_name: str
    md5sum: str = "*"
    message_definition: str = ""
    callerid: str | None = None
    latching: bool | None = None


@dataclass(frozen=True)
class RawMessage:
    conn_id: int
    time_ns: int
    payload: bytes


class IndexEntry(NamedTuple):
    """Locator for one message: time plus physical position."""

    time_ns: int
    chunk_pos: int
    offset: int


@dataclass
class ChunkSlot:
    pos: int
    start_ns: int
    end_ns: int
    counts: dict[int, int]


@dataclass
class BagIndex:
    entries: dict[int, list[IndexEntry]] = field(default_factory=dict)
    chunks: list[ChunkSlot] = field(default_factory=list)

    def count_for(self, conn_id: int) -> int:
        return len(self.entries.get(conn_id, ()))

    def total_count(self) -> int:
        return sum(len(v) for v in self.entries.values())

    def time_bounds(self) -> tuple[int, int] | None:
        lows = [e[0].time_ns for e in self.entries.values() if e]
        highs = [e[-1].time_ns for e in self.entries.values() if e]
        if not lows:
            return None
        return min(lows), max(highs)


@dataclass(frozen=True)
class WrittenBagStats:
    message_count: int
    chunk_count: int
    file_size: int
