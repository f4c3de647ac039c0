"""Bag container reading and writing (ROS1 v2.0 + JSONL debug format)."""

import os
from pathlib import Path
from typing import Union

from ..errors import NotABag
from .jsonl import JsonlBagHandle, write_jsonl
from .reader import BagHandle
from .types import (
    BagHeaderInfo,
    BagIndex,
    ChunkSlot,
    ConnectionRecord,
    IndexEntry,
    RawMessage,
    WrittenBagStats,
)
from .writer import DEFAULT_CHUNK_TARGET, write_bag

AnyBagHandle = Union[BagHandle, JsonlBagHandle]

BAG_SUFFIXES = (".bag", ".jsonl")


def open_bag(path: str | os.PathLike) -> AnyBagHandle:
    """Open a .bag (ROS1 v2.0) or .jsonl (debug) file."""
    p = Path(path)
    if not p.is_file():
        raise NotABag(f"{p} is not a file")
    if p.suffix == ".jsonl":
        return JsonlBagHandle(p)
    return BagHandle(p)


__all__ = [
    "AnyBagHandle",
    "BAG_SUFFIXES",
    "BagHandle",
    "BagHeaderInfo",
    "BagIndex",
    "ChunkSlot",
    "ConnectionRecord",
    "DEFAULT_CHUNK_TARGET",
    "IndexEntry",
    "JsonlBagHandle",
    "RawMessage",
    "WrittenBagStats",
    "open_bag",
    "write_bag",
    "write_jsonl",
]
