"""Synthetic bag generation: scenarios, simulation, fixture writing."""

from .fixtures import (
    CANNED,
    generate,
    load_sidecar,
    sidecar_path,
    write_fixture,
    write_jsonl_fixture,
)
from .scenario import Command, LogEvent, Obstacle, ScanModel, Scenario, World
from .simulate import SimTrace, TINY_PNG, cast_scan, simulate

__all__ = [
    "CANNED",
    "Command",
    "LogEvent",
    "Obstacle",
    "ScanModel",
    "Scenario",
    "SimTrace",
    "TINY_PNG",
    "World",
    "cast_scan",
    "generate",
    "load_sidecar",
    "sidecar_path",
    "simulate",
    "write_fixture",
    "write_jsonl_fixture",
]
