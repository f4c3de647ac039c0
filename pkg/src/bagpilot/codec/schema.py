"""Message-definition text parsing.

Bags embed the full IDL of every type they carry: the root definition
followed by one block per dependency, separated by a line of '='
characters and a "MSG: pkg/Name" label. This module turns that text
into a resolved, cycle-free schema set.
"""

import re
from dataclasses import dataclass, field

from ..errors import CyclicType, DefinitionError, UnknownFieldType, UnresolvedNestedType

PRIMITIVE_TYPES = frozenset({
    "bool",
    "int8", "uint8", "int16", "uint16", "int32", "uint32", "int64", "uint64",
    "float32", "float64",
    "string", "time", "duration",
})

# older IDL aliases
_TYPE_ALIASES = {"byte": "int8", "char": "uint8"}

HEADER_TYPE = "std_msgs/Header"
HEADER_DEFINITION = "uint32 seq\ntime stamp\nstring frame_id\n"

_SEPARATOR_RE = re.compile(r"^=+\s*$")
_MSG_LABEL_RE = re.compile(r"^MSG:\s*(\S+)\s*$")
_FIELD_RE = re.compile(r"^(\S+)\s+([A-Za-z_][A-Za-z0-9_]*)\s*$")
_ARRAY_RE = re.compile(r"^(..*?)\[(\d*)\]$")

VAR_ARRAY = -1


@dataclass(frozen=True)
class FieldType:
    """Resolved type of a single field.

    base is a primitive name or a fully-qualified nested type name.
    array_len: None for scalars, VAR_ARRAY for var-length arrays,
    n >= 0 for fixed arrays.
    """

    base: str
    is_nested: bool = False
    array_len: int | None = None

    @property
    def is_array(self) -> bool:
        return self.array_len is not None


@dataclass(frozen=True)
class MessageSchema:
    type_name: str
    fields: tuple[tuple[str, FieldType], ...]


@dataclass(eq=False)  # identity hash: plans are cached per instance
class SchemaSet:
    """Root schema plus every dependency, keyed by full type name."""

    root_type: str
    by_name: dict[str, MessageSchema] = field(default_factory=dict)

    @property
    def root(self) -> MessageSchema:
        return self.by_name[self.root_type]

    def get(self, type_name: str) -> MessageSchema:
        return self.by_name[type_name]


def _package_of(type_name: str) -> str:
    return type_name.rsplit("/", 1)[0] if "/" in type_name else ""


def _split_blocks(text: str, root_type: str) -> list[tuple[str, list[str]]]:
    """Split embedded definition text into (type_name, lines) blocks."""
    blocks: list[tuple[str, list[str]]] = []
    current_name = root_type
    current_lines: list[str] = []
    pending_label = False
    for raw in text.splitlines():
        if _SEPARATOR_RE.match(raw) and len(raw.strip()) >= 4:
            blocks.append((current_name, current_lines))
            current_name = ""
            current_lines = []
            pending_label = True
            continue
        if pending_label:
            m = _MSG_LABEL_RE.match(raw.strip())
            if m:
                current_name = m.group(1)
                pending_label = False
                continue
            if not raw.strip():
                continue
            raise DefinitionError(
                f"expected 'MSG: <type>' after separator, got {raw.strip()!r}"
            )
        current_lines.append(raw)
    blocks.append((current_name, current_lines))
    return [(name, lines) for name, lines in blocks if name]


def _parse_block(type_name: str, lines: list[str]) -> list[tuple[str, str]]:
    """Parse one definition block into raw (field_name, type_token) pairs."""
    fields: list[tuple[str, str]] = []
    seen: set[str] = set()
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) == 2 and "=" in parts[1]:
            # constant declaration: "TYPE NAME=VALUE"
            continue
        m = _FIELD_RE.match(line)
        if m is None:
            raise DefinitionError(f"unparseable field line in {type_name}: {line!r}")
        type_token, name = m.group(1), m.group(2)
        if name in seen:
            raise DefinitionError(f"duplicate field {name!r} in {type_name}")
        seen.add(name)
        fields.append((name, type_token))
    return fields


def _resolve_type(
    token: str,
    owner_package: str,
    known: dict[str, list[tuple[str, str]]],
) -> tuple[str, bool, int | None]:
    """Resolve one type token to (base, is_nested, array_len)."""
    array_len: int | None = None
    m = _ARRAY_RE.match(token)
    if m:
        token = m.group(1)
        array_len = int(m.group(2)) if m.group(2) else VAR_ARRAY

    token = _TYPE_ALIASES.get(token, token)
    if token in PRIMITIVE_TYPES:
        return token, False, array_len
    if token == "Header":
        token = HEADER_TYPE

    # nested type: exact, then package-local, then unique suffix match
    if token in known:
        return token, True, array_len
    if owner_package and f"{owner_package}/{token}" in known:
        return f"{owner_package}/{token}", True, array_len
    suffix_hits = [name for name in known if name.endswith(f"/{token}")]
    if len(suffix_hits) == 1:
        return suffix_hits[0], True, array_len
    if token == HEADER_TYPE:
        return token, True, array_len  # injected below
    if "/" in token or token[:1].isupper():
        raise UnresolvedNestedType(
            f"no definition block for message type {token!r}"
        )
    raise UnknownFieldType(f"unknown field type {token!r}")


def parse_definition(definition_text: str, root_type: str) -> SchemaSet:
    """Parse embedded IDL text into a resolved SchemaSet.

    Raises UnknownFieldType, UnresolvedNestedType or CyclicType.
    """
    blocks = _split_blocks(definition_text, root_type)
    raw: dict[str, list[tuple[str, str]]] = {}
    for name, lines in blocks:
        raw[name] = _parse_block(name, lines)

    # "Header" shorthand is always resolvable
    needs_header = HEADER_TYPE not in raw
    if needs_header:
        raw[HEADER_TYPE] = _parse_block(HEADER_TYPE, HEADER_DEFINITION.splitlines())

    schemas: dict[str, MessageSchema] = {}
    for name, fields in raw.items():
        package = _package_of(name)
        resolved = tuple(
            (fname, FieldType(*_resolve_type(token, package, raw)))
            for fname, token in fields
        )
        schemas[name] = MessageSchema(name, resolved)

    _check_acyclic(schemas, root_type)
    return SchemaSet(root_type, schemas)


def _check_acyclic(schemas: dict[str, MessageSchema], root: str) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = dict.fromkeys(schemas, WHITE)

    def visit(name: str, chain: list[str]) -> None:
        color[name] = GRAY
        for _, ftype in schemas[name].fields:
            if not ftype.is_nested:
                continue
            dep = ftype.base
            if dep not in schemas:
                raise UnresolvedNestedType(f"no definition block for message type {dep!r}")
            if color[dep] == GRAY:
                cycle = " -> ".join(chain + [name, dep])
                raise CyclicType(f"recursive message definition: {cycle}")
            if color[dep] == WHITE:
                visit(dep, chain + [name])
        color[name] = BLACK

    visit(root, [])
    for name in schemas:
        if color[name] == WHITE:
            visit(name, [])
