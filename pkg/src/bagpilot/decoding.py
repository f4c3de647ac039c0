"""Bridge between the bag container and the message codec: schema
caching per connection and a decoded message stream."""

from dataclasses import dataclass
from typing import Iterable, Iterator

from . import codec
from .bagio import AnyBagHandle, ConnectionRecord
from .errors import BagpilotError


@dataclass
class DecodedMessage:
    topic: str
    type_name: str
    time_ns: int
    value: dict
    warnings: list[str]

    @property
    def time_s(self) -> float:
        return self.time_ns / 1e9


def schema_for(handle: AnyBagHandle, conn: ConnectionRecord):
    """SchemaSet for a connection, or None if it cannot be parsed."""
    cache = getattr(handle, "_schema_cache", None)
    if cache is None:
        cache = {}
        handle._schema_cache = cache  # type: ignore[union-attr]
    if conn.conn_id in cache:
        return cache[conn.conn_id]
    schemas = None
    try:
        if conn.message_definition.strip():
            schemas = codec.parse_definition(conn.message_definition, conn.type_name)
        elif conn.type_name in codec.BUILTIN_TYPES:
            schemas = codec.builtin_schema(conn.type_name)
    except BagpilotError:
        schemas = None
    cache[conn.conn_id] = schemas
    return schemas


def decoded_stream(
    handle: AnyBagHandle,
    topics: Iterable[str] | None = None,
    start_ns: int | None = None,
    end_ns: int | None = None,
) -> Iterator[DecodedMessage]:
    """Decode messages in time order; undecodable connections are skipped."""
    for conn, msg in handle.stream(topics, start_ns, end_ns):
        schemas = schema_for(handle, conn)
        if schemas is None:
            continue
        value, warnings = codec.decode_full(schemas, msg.payload)
        yield DecodedMessage(conn.topic, conn.type_name, msg.time_ns, value, warnings)
