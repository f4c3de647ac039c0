"""Filtered bag copies: topic subset, time window, per-topic rate cap.

Payload bytes are copied verbatim; timestamps are never rewritten.
Rate limiting is greedy keep-first: the first message per topic is
always kept, later ones only when enough time has passed since the
last kept one.
"""

from dataclasses import dataclass, field
from pathlib import Path

from .bagio import open_bag, write_bag
from .errors import BadCondition, InvalidRange, SameSourceDest
from .rostime import ns_from_seconds

# one nanosecond of slack absorbs seconds->ns rounding
_RATE_EPSILON_NS = 1.0


@dataclass
class FilterReport:
    source: str
    destination: str
    per_topic: dict[str, tuple[int, int]] = field(default_factory=dict)
    total_in: int = 0
    total_out: int = 0
    output_size: int = 0
    output_duration: float = 0.0
    chunk_count: int = 0


def filter_bag(
    source: str | Path,
    destination: str | Path,
    topics: set[str] | None = None,
    start_time: float | None = None,
    end_time: float | None = None,
    max_rate_hz: float | None = None,
) -> FilterReport:
    source = Path(source)
    destination = Path(destination)
    if destination.resolve() == source.resolve():
        raise SameSourceDest(
            f"destination must differ from source ({source})"
        )
    if max_rate_hz is not None and max_rate_hz <= 0:
        raise BadCondition(f"max_rate_hz must be positive, got {max_rate_hz}")
    if start_time is not None and end_time is not None and start_time > end_time:
        raise InvalidRange(
            f"start_time {start_time} is after end_time {end_time}"
        )

    handle = open_bag(source)
    start_ns = None if start_time is None else ns_from_seconds(start_time)
    end_ns = None if end_time is None else ns_from_seconds(end_time)
    min_gap_ns = None if max_rate_hz is None else 1e9 / max_rate_hz - _RATE_EPSILON_NS

    surviving = [
        c for c in handle.connections
        if topics is None or c.topic in topics
    ]
    surviving_topics = {c.topic for c in surviving}

    report = FilterReport(str(source), str(destination))
    for topic, conns in sorted(handle.topics().items()):
        count = sum(handle.index.count_for(c.conn_id) for c in conns)
        report.per_topic[topic] = (count, 0)
        report.total_in += count

    first_kept_ns: int | None = None
    last_kept_ns: int | None = None

    def survivors():
        nonlocal first_kept_ns, last_kept_ns
        last_per_topic: dict[str, int] = {}
        for conn, msg in handle.stream(surviving_topics, start_ns, end_ns):
            if min_gap_ns is not None:
                last = last_per_topic.get(conn.topic)
                if last is not None and msg.time_ns - last < min_gap_ns:
                    continue
                last_per_topic[conn.topic] = msg.time_ns
            in_count, out_count = report.per_topic[conn.topic]
            report.per_topic[conn.topic] = (in_count, out_count + 1)
            report.total_out += 1
            if first_kept_ns is None:
                first_kept_ns = msg.time_ns
            last_kept_ns = msg.time_ns
            yield msg

    stats = write_bag(destination, surviving, survivors())
    report.output_size = stats.file_size
    report.chunk_count = stats.chunk_count
    if first_kept_ns is not None and last_kept_ns is not None:
        report.output_duration = (last_kept_ns - first_kept_ns) / 1e9
    return report
