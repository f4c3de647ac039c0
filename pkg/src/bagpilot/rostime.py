"""Timestamp conversions.

Bag records store time as (sec: u32, nsec: u32); internally everything
is integer nanoseconds since the Unix epoch. Tool parameters use float
unix seconds.
"""

from typing import NamedTuple

NS_PER_S = 1_000_000_000


class TimeVal(NamedTuple):
    """A decoded ROS time or duration value."""

    sec: int
    nsec: int

    def to_ns(self) -> int:
        return self.sec * NS_PER_S + self.nsec

    def to_seconds(self) -> float:
        return self.sec + self.nsec / NS_PER_S

    @classmethod
    def from_ns(cls, ns: int) -> "TimeVal":
        return cls(ns // NS_PER_S, ns % NS_PER_S)

    @classmethod
    def from_seconds(cls, s: float) -> "TimeVal":
        return cls.from_ns(ns_from_seconds(s))


def ns_from_seconds(s: float) -> int:
    return int(round(s * NS_PER_S))


def seconds_from_ns(ns: int) -> float:
    return ns / NS_PER_S
