"""Compile a schema into a flat decode plan.

The plan is a nested tuple program interpreted by either executor
(pure Python or the compiled extension). Keeping compilation separate
lets both executors stay dumb and fast.
"""

from functools import lru_cache

from .schema import VAR_ARRAY, FieldType, MessageSchema, SchemaSet

# scalar opcodes (sizes fixed)
OP_BOOL = 0
OP_I8 = 1
OP_U8 = 2
OP_I16 = 3
OP_U16 = 4
OP_I32 = 5
OP_U32 = 6
OP_I64 = 7
OP_U64 = 8
OP_F32 = 9
OP_F64 = 10
OP_TIME = 11
OP_DURATION = 12
# variadic opcodes
OP_STRING = 13
OP_BYTES_FIXED = 14   # (op, n)            uint8[n] -> bytes
OP_BYTES_VAR = 15     # (op,)              uint8[]  -> bytes
OP_ARR_FIXED = 16     # (op, n, elem_plan)
OP_ARR_VAR = 17       # (op, elem_plan)
OP_RECORD = 18        # (op, names_tuple, plans_tuple)

_SCALAR_OPS = {
    "bool": OP_BOOL,
    "int8": OP_I8,
    "uint8": OP_U8,
    "int16": OP_I16,
    "uint16": OP_U16,
    "int32": OP_I32,
    "uint32": OP_U32,
    "int64": OP_I64,
    "uint64": OP_U64,
    "float32": OP_F32,
    "float64": OP_F64,
    "time": OP_TIME,
    "duration": OP_DURATION,
}

SCALAR_SIZES = {
    OP_BOOL: 1, OP_I8: 1, OP_U8: 1, OP_I16: 2, OP_U16: 2,
    OP_I32: 4, OP_U32: 4, OP_I64: 8, OP_U64: 8,
    OP_F32: 4, OP_F64: 8, OP_TIME: 8, OP_DURATION: 8,
}

STRUCT_CODES = {
    OP_BOOL: "?", OP_I8: "b", OP_U8: "B", OP_I16: "h", OP_U16: "H",
    OP_I32: "i", OP_U32: "I", OP_I64: "q", OP_U64: "Q",
    OP_F32: "f", OP_F64: "d",
}


def _compile_field(ftype: FieldType, schemas: SchemaSet) -> tuple:
    if ftype.is_nested:
        elem = _compile_record(schemas.get(ftype.base), schemas)
    elif ftype.base == "string":
        elem = (OP_STRING,)
    else:
        elem = (_SCALAR_OPS[ftype.base],)

    if ftype.array_len is None:
        return elem
    if ftype.base == "uint8" and not ftype.is_nested:
        if ftype.array_len == VAR_ARRAY:
            return (OP_BYTES_VAR,)
        return (OP_BYTES_FIXED, ftype.array_len)
    if ftype.array_len == VAR_ARRAY:
        return (OP_ARR_VAR, elem)
    return (OP_ARR_FIXED, ftype.array_len, elem)


def _compile_record(schema: MessageSchema, schemas: SchemaSet) -> tuple:
    names = tuple(name for name, _ in schema.fields)
    plans = tuple(_compile_field(ftype, schemas) for _, ftype in schema.fields)
    return (OP_RECORD, names, plans)


@lru_cache(maxsize=256)
def compile_plan(schemas: SchemaSet, type_name: str | None = None) -> tuple:
    """Compile the decode plan for type_name (default: the root type)."""
    name = type_name or schemas.root_type
    return _compile_record(schemas.get(name), schemas)
