"""Message-definition parsing and payload decode/encode.

Decoding runs through a compiled executor when the extension built,
otherwise through the pure-Python twin. BAGPILOT_PURE_PYTHON=1 forces
the fallback (used by the decode benchmark and equivalence tests).
"""

import os

from ..errors import TrailingBytes
from .builtins import BUILTIN_TYPES, builtin_schema, full_definition, md5sum
from .encode import encode
from .fieldpath import get_field, get_numeric, split_path
from .plan import compile_plan
from .schema import (
    VAR_ARRAY,
    FieldType,
    MessageSchema,
    SchemaSet,
    parse_definition,
)
from .values import display_value, from_jsonable, to_jsonable

if os.environ.get("BAGPILOT_PURE_PYTHON"):
    from . import _pydecode as _executor
else:
    try:
        from . import _fastdecode as _executor  # type: ignore[no-redef]
    except ImportError:
        from . import _pydecode as _executor  # type: ignore[no-redef]

BACKEND: str = _executor.BACKEND_NAME


def decode_full(schemas: SchemaSet, payload: bytes, type_name: str | None = None):
    """Decode payload; returns (value, warnings)."""
    plan = compile_plan(schemas, type_name)
    warnings: list[str] = []
    value, consumed = _executor.execute(plan, bytes(payload), 0, warnings)
    if consumed != len(payload):
        raise TrailingBytes(
            f"decoded {consumed} of {len(payload)} payload bytes"
        )
    return value, warnings


def decode(schemas: SchemaSet, payload: bytes, type_name: str | None = None):
    """Decode payload into a value tree (root type by default)."""
    return decode_full(schemas, payload, type_name)[0]


__all__ = [
    "BACKEND",
    "BUILTIN_TYPES",
    "FieldType",
    "MessageSchema",
    "SchemaSet",
    "VAR_ARRAY",
    "builtin_schema",
    "compile_plan",
    "decode",
    "decode_full",
    "display_value",
    "encode",
    "from_jsonable",
    "full_definition",
    "get_field",
    "get_numeric",
    "md5sum",
    "parse_definition",
    "split_path",
    "to_jsonable",
]
