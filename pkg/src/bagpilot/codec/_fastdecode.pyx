# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled decode-plan executor.

Drop-in replacement for bagpilot.codec._pydecode. Both interpret the
same plan tuples and must return identical value trees; the test suite
cross-checks them on random payloads.
"""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.string cimport memcpy

from ..errors import ShortPayload
from ..rostime import TimeVal
from .plan import (
    OP_ARR_FIXED,
    OP_ARR_VAR,
    OP_BOOL,
    OP_BYTES_FIXED,
    OP_BYTES_VAR,
    OP_DURATION,
    OP_F32,
    OP_F64,
    OP_I8,
    OP_I16,
    OP_I32,
    OP_I64,
    OP_RECORD,
    OP_STRING,
    OP_TIME,
    OP_U8,
    OP_U16,
    OP_U32,
    OP_U64,
)

BACKEND_NAME = "c"

cdef int C_BOOL = OP_BOOL
cdef int C_I8 = OP_I8
cdef int C_U8 = OP_U8
cdef int C_I16 = OP_I16
cdef int C_U16 = OP_U16
cdef int C_I32 = OP_I32
cdef int C_U32 = OP_U32
cdef int C_I64 = OP_I64
cdef int C_U64 = OP_U64
cdef int C_F32 = OP_F32
cdef int C_F64 = OP_F64
cdef int C_TIME = OP_TIME
cdef int C_DURATION = OP_DURATION
cdef int C_STRING = OP_STRING
cdef int C_BYTES_FIXED = OP_BYTES_FIXED
cdef int C_BYTES_VAR = OP_BYTES_VAR
cdef int C_ARR_FIXED = OP_ARR_FIXED
cdef int C_ARR_VAR = OP_ARR_VAR
cdef int C_RECORD = OP_RECORD

cdef object _TIMEVAL = TimeVal
cdef object _SHORT = ShortPayload


cdef inline unsigned int _read_u16(const unsigned char* p):
    return (<unsigned int>p[0]) | ((<unsigned int>p[1]) << 8)


cdef inline unsigned int _read_u32(const unsigned char* p):
    return ((<unsigned int>p[0])
            | ((<unsigned int>p[1]) << 8)
            | ((<unsigned int>p[2]) << 16)
            | ((<unsigned int>p[3]) << 24))


cdef inline unsigned long long _read_u64(const unsigned char* p):
    return (<unsigned long long>_read_u32(p)
            | (<unsigned long long>_read_u32(p + 4)) << 32)


cdef inline float _read_f32(const unsigned char* p):
    cdef unsigned int bits = _read_u32(p)
    cdef float out
    memcpy(&out, &bits, 4)
    return out


cdef inline double _read_f64(const unsigned char* p):
    cdef unsigned long long bits = _read_u64(p)
    cdef double out
    memcpy(&out, &bits, 8)
    return out


cdef inline int _scalar_size(int op):
    if op == C_BOOL or op == C_I8 or op == C_U8:
        return 1
    if op == C_I16 or op == C_U16:
        return 2
    if op == C_I32 or op == C_U32 or op == C_F32:
        return 4
    return 8


cdef object _need(Py_ssize_t n, Py_ssize_t pos, Py_ssize_t count):
    raise _SHORT(f"payload ended at byte {n}, needed {pos + count}")


cdef object _scalar(int op, const unsigned char* data, Py_ssize_t n,
                    Py_ssize_t* pos, bint check):
    cdef Py_ssize_t p = pos[0]
    cdef int size = _scalar_size(op)
    if check and p + size > n:
        _need(n, p, size)
    pos[0] = p + size
    if op == C_F64:
        return _read_f64(data + p)
    if op == C_F32:
        return _read_f32(data + p)
    if op == C_BOOL:
        return data[p] != 0
    if op == C_I8:
        return <long>(<signed char>data[p])
    if op == C_U8:
        return <long>data[p]
    if op == C_I16:
        return <long>(<short>_read_u16(data + p))
    if op == C_U16:
        return <long>_read_u16(data + p)
    if op == C_I32:
        return <long>(<int>_read_u32(data + p))
    if op == C_U32:
        return <unsigned long>_read_u32(data + p)
    if op == C_I64:
        return <long long>_read_u64(data + p)
    if op == C_U64:
        return _read_u64(data + p)
    # time / duration
    return _TIMEVAL(<unsigned long>_read_u32(data + p),
                    <unsigned long>_read_u32(data + p + 4))


cdef object _string(const unsigned char* data, Py_ssize_t n,
                    Py_ssize_t* pos, list warnings):
    cdef Py_ssize_t p = pos[0]
    cdef Py_ssize_t length
    if p + 4 > n:
        _need(n, p, 4)
    length = <Py_ssize_t>_read_u32(data + p)
    p += 4
    if p + length > n:
        _need(n, p, length)
    raw = PyBytes_FromStringAndSize(<const char*>(data + p), length)
    pos[0] = p + length
    try:
        return raw.decode("utf-8")
    except UnicodeDecodeError:
        warnings.append(f"invalid UTF-8 in string field at byte {p}")
        return raw.decode("utf-8", errors="replace")


cdef object _exec(tuple plan, const unsigned char* data, Py_ssize_t n,
                  Py_ssize_t* pos, list warnings):
    cdef int op = <int>plan[0]
    cdef Py_ssize_t count, i, p
    cdef int elem_op, size
    cdef tuple elem, names, plans
    cdef list out
    cdef dict record

    if op == C_RECORD:
        record = {}
        names = <tuple>plan[1]
        plans = <tuple>plan[2]
        for i in range(len(names)):
            record[names[i]] = _exec(<tuple>plans[i], data, n, pos, warnings)
        return record

    if op == C_STRING:
        return _string(data, n, pos, warnings)

    if op == C_BYTES_VAR or op == C_BYTES_FIXED:
        p = pos[0]
        if op == C_BYTES_VAR:
            if p + 4 > n:
                _need(n, p, 4)
            count = <Py_ssize_t>_read_u32(data + p)
            p += 4
        else:
            count = <Py_ssize_t>plan[1]
        if p + count > n:
            _need(n, p, count)
        pos[0] = p + count
        return PyBytes_FromStringAndSize(<const char*>(data + p), count)

    if op == C_ARR_FIXED or op == C_ARR_VAR:
        p = pos[0]
        if op == C_ARR_VAR:
            if p + 4 > n:
                _need(n, p, 4)
            count = <Py_ssize_t>_read_u32(data + p)
            p += 4
            pos[0] = p
            elem = <tuple>plan[1]
        else:
            count = <Py_ssize_t>plan[1]
            elem = <tuple>plan[2]
        elem_op = <int>elem[0]
        out = []
        if elem_op < C_STRING and elem_op != C_TIME and elem_op != C_DURATION:
            size = _scalar_size(elem_op)
            if p + count * size > n:
                _need(n, p, count * size)
            for i in range(count):
                out.append(_scalar(elem_op, data, n, pos, False))
            return out
        for i in range(count):
            out.append(_exec(elem, data, n, pos, warnings))
        return out

    return _scalar(op, data, n, pos, True)


def execute(tuple plan, bytes buf, pos, list warnings):
    """Run one plan node at pos; returns (value, new_pos)."""
    cdef const unsigned char* data = <const unsigned char*>PyBytes_AS_STRING(buf)
    cdef Py_ssize_t n = len(buf)
    cdef Py_ssize_t p = pos
    value = _exec(plan, data, n, &p, warnings)
    return value, p
