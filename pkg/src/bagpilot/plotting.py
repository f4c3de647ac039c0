"""PNG plot rendering: time series, 2D trajectories, polar laser scans.

Numeric truth lives in the returned series summaries; pixels are
presentation. Rendering uses the object-oriented Agg canvas only, so
output is deterministic for a fixed request and bag.
"""

import math
import struct
from dataclasses import dataclass, field
from io import BytesIO

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from . import codec
from .decoding import decoded_stream
from .errors import (
    AmbiguousTopic,
    BadCondition,
    NoMessageWithinTolerance,
    NoScanNearTime,
    UnknownTopic,
)
from .rostime import ns_from_seconds
from .store import DEFAULT_TOLERANCE_S, POSE_PATHS, Session, get_message_at_time
from .analysis import _pose_fields

PLOT_STYLES = ("line", "scatter", "step", "histogram")
MIN_DIM, MAX_DIM = 64, 4096
DEFAULT_WIDTH, DEFAULT_HEIGHT = 800, 600
DEFAULT_BINS = 30
_DPI = 100

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


@dataclass
class SeriesSummary:
    name: str
    point_count: int
    min: float | None
    max: float | None
    mean: float | None
    histogram: dict | None = None


@dataclass
class PlotResult:
    png: bytes
    width: int
    height: int
    series: list[SeriesSummary] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    mime_type: str = "image/png"


def png_dimensions(png: bytes) -> tuple[int, int]:
    if png[:8] != _PNG_SIGNATURE:
        raise ValueError("not a PNG byte stream")
    w, h = struct.unpack(">II", png[16:24])
    return w, h


def _check_dims(width: int, height: int) -> None:
    for name, v in (("width", width), ("height", height)):
        if not (MIN_DIM <= v <= MAX_DIM):
            raise BadCondition(
                f"{name} must be between {MIN_DIM} and {MAX_DIM} pixels, got {v}"
            )


def _render(fig: Figure, width: int, height: int) -> bytes:
    fig.set_dpi(_DPI)
    fig.set_size_inches(width / _DPI, height / _DPI)
    FigureCanvasAgg(fig)
    buf = BytesIO()
    fig.savefig(buf, format="png", dpi=_DPI)
    return buf.getvalue()


def _summarize(name: str, values: list[float]) -> SeriesSummary:
    if not values:
        return SeriesSummary(name, 0, None, None, None)
    return SeriesSummary(
        name, len(values), min(values), max(values), sum(values) / len(values)
    )


def resolve_topic_alias(handle, alias: str) -> str:
    """Map a field's leading segment to a topic: exact "/alias", then
    unique suffix match; ambiguity and misses are descriptive errors."""
    topics = handle.topics()
    if alias.startswith("/"):
        if alias in topics:
            return alias
        raise UnknownTopic(
            f"topic {alias!r} is not in this bag; available: "
            f"{', '.join(sorted(topics))}"
        )
    exact = f"/{alias}"
    if exact in topics:
        return exact
    candidates = [t for t in topics if t.rsplit("/", 1)[-1] == alias]
    if len(candidates) == 1:
        return candidates[0]
    if candidates:
        raise AmbiguousTopic(
            f"alias {alias!r} matches several topics: {', '.join(sorted(candidates))}; "
            "use a full topic path"
        )
    raise UnknownTopic(
        f"no topic matches {alias!r}; available: {', '.join(sorted(topics))}"
    )


def _split_field(handle, qualified: str) -> tuple[str, list[str]]:
    segments = codec.split_path(qualified)
    topic = resolve_topic_alias(handle, segments[0])
    if len(segments) < 2:
        raise BadCondition(
            f"field {qualified!r} addresses a whole topic; qualify it like "
            "\"cmd_vel.linear.x\""
        )
    return topic, segments[1:]


def _collect_series(
    handle, qualified: str, start_ns, end_ns
) -> tuple[list[float], list[float]]:
    """Returns (times_s, values) for one topic-qualified field."""
    topic, path = _split_field(handle, qualified)
    times: list[float] = []
    values: list[float] = []
    for msg in decoded_stream(handle, [topic], start_ns, end_ns):
        v = codec.get_field(msg.value, path)
        if isinstance(v, bool):
            v = float(v)
        if not isinstance(v, (int, float)):
            raise BadCondition(
                f"field {qualified!r} is not numeric (got {type(v).__name__})"
            )
        times.append(msg.time_s)
        values.append(float(v))
    return times, values


def plot_timeseries(
    session: Session,
    fields: list[str],
    style: str = "line",
    start_time: float | None = None,
    end_time: float | None = None,
    title: str | None = None,
    x_label: str | None = None,
    y_label: str | None = None,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
    bins: int = DEFAULT_BINS,
    bag_path: str | None = None,
) -> tuple[PlotResult, str | None]:
    if not fields:
        raise BadCondition("plot_timeseries needs at least one field")
    if style not in PLOT_STYLES:
        raise BadCondition(
            f"unknown style {style!r}; valid: {', '.join(PLOT_STYLES)}"
        )
    _check_dims(width, height)
    handle, note = session.open(bag_path)
    bounds = handle.time_bounds_ns()
    bag_start_s = (bounds[0] / 1e9) if bounds else 0.0
    start_ns = None if start_time is None else ns_from_seconds(start_time)
    end_ns = None if end_time is None else ns_from_seconds(end_time)

    fig = Figure()
    ax = fig.add_subplot(111)
    summaries: list[SeriesSummary] = []
    warnings: list[str] = []
    plotted_any = False
    for qualified in fields:
        times, values = _collect_series(handle, qualified, start_ns, end_ns)
        summary = _summarize(qualified, values)
        if not values:
            warnings.append(f"series {qualified!r} has no data in the window")
            summaries.append(summary)
            continue
        rel = [t - bag_start_s for t in times]
        if style == "line":
            ax.plot(rel, values, label=qualified, linewidth=1.2)
        elif style == "scatter":
            ax.plot(rel, values, ".", markersize=3, label=qualified)
        elif style == "step":
            ax.step(rel, values, where="post", label=qualified, linewidth=1.2)
        else:  # histogram ignores the time axis
            counts, edges = np.histogram(values, bins=bins)
            ax.stairs(counts, edges, fill=True, alpha=0.6, label=qualified)
            summary.histogram = {
                "bin_edges": [float(e) for e in edges],
                "counts": [int(c) for c in counts],
            }
        plotted_any = True
        summaries.append(summary)

    if style == "histogram":
        ax.set_xlabel(x_label or "value")
        ax.set_ylabel(y_label or "count")
    else:
        ax.set_xlabel(x_label or "time since bag start (s)")
        ax.set_ylabel(y_label or "value")
    ax.set_title(title or ("Histogram" if style == "histogram" else "Time series"))
    if plotted_any:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    png = _render(fig, width, height)
    w, h = png_dimensions(png)
    return PlotResult(png, w, h, summaries, warnings, {"style": style}), note


def plot_2d(
    session: Session,
    pose_topic: str | None = None,
    x_field: str | None = None,
    y_field: str | None = None,
    start_time: float | None = None,
    end_time: float | None = None,
    title: str | None = None,
    x_label: str | None = None,
    y_label: str | None = None,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
    bag_path: str | None = None,
) -> tuple[PlotResult, str | None]:
    if pose_topic is None and not (x_field and y_field):
        raise BadCondition(
            "plot_2d needs either pose_topic or both x_field and y_field"
        )
    _check_dims(width, height)
    handle, note = session.open(bag_path)
    start_ns = None if start_time is None else ns_from_seconds(start_time)
    end_ns = None if end_time is None else ns_from_seconds(end_time)

    warnings: list[str] = []
    if pose_topic is not None:
        topics = handle.topics()
        if pose_topic not in topics:
            raise UnknownTopic(
                f"topic {pose_topic!r} is not in this bag; available: "
                f"{', '.join(sorted(topics))}"
            )
        path = _pose_fields(topics[pose_topic][0].type_name, pose_topic)
        xs: list[float] = []
        ys: list[float] = []
        for msg in decoded_stream(handle, [pose_topic], start_ns, end_ns):
            pos = msg.value
            for seg in path:
                pos = pos[seg]
            xs.append(pos["x"])
            ys.append(pos["y"])
        x_name, y_name = f"{pose_topic}.x", f"{pose_topic}.y"
    else:
        _, xs = _collect_series(handle, x_field, start_ns, end_ns)
        _, ys = _collect_series(handle, y_field, start_ns, end_ns)
        if len(xs) != len(ys):
            warnings.append(
                f"x series has {len(xs)} points, y has {len(ys)}; "
                "pairing by index up to the shorter one"
            )
            n = min(len(xs), len(ys))
            xs, ys = xs[:n], ys[:n]
        x_name, y_name = x_field, y_field

    fig = Figure()
    ax = fig.add_subplot(111)
    if xs:
        ax.plot(xs, ys, "-", linewidth=1.2, color="tab:blue")
        ax.plot(xs[0], ys[0], "o", color="tab:green", markersize=8, label="start")
        ax.plot(xs[-1], ys[-1], "s", color="tab:red", markersize=8, label="end")
        ax.legend(loc="best", fontsize=8)
    else:
        warnings.append("no points in the requested window")
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel(x_label or "x (m)")
    ax.set_ylabel(y_label or "y (m)")
    ax.set_title(title or "2D trajectory")
    ax.grid(True, alpha=0.3)
    png = _render(fig, width, height)
    w, h = png_dimensions(png)
    extras = {}
    if xs:
        extras = {
            "x_min": min(xs), "x_max": max(xs), "x_span": max(xs) - min(xs),
            "y_min": min(ys), "y_max": max(ys), "y_span": max(ys) - min(ys),
            "points": len(xs),
        }
    result = PlotResult(
        png, w, h,
        [_summarize(x_name, xs), _summarize(y_name, ys)],
        warnings, extras,
    )
    return result, note


def plot_lidar_scan(
    session: Session,
    scan_topic: str,
    time: float,
    title: str | None = None,
    width: int = DEFAULT_WIDTH,
    height: int = DEFAULT_HEIGHT,
    bag_path: str | None = None,
) -> tuple[PlotResult, str | None]:
    _check_dims(width, height)
    try:
        msg, actual, _, note = get_message_at_time(
            session, scan_topic, time, DEFAULT_TOLERANCE_S, bag_path
        )
    except NoMessageWithinTolerance as exc:
        raise NoScanNearTime(str(exc)) from None
    scan = msg.value
    if "ranges" not in scan:
        raise BadCondition(f"{scan_topic} does not carry laser scans")
    ranges = scan["ranges"]
    angle_min, inc = scan["angle_min"], scan["angle_increment"]
    rmin, rmax = scan["range_min"], scan["range_max"]
    thetas: list[float] = []
    valid: list[float] = []
    for i, r in enumerate(ranges):
        if math.isfinite(r) and rmin <= r <= rmax:
            thetas.append(angle_min + i * inc)
            valid.append(r)

    fig = Figure()
    ax = fig.add_subplot(111, projection="polar")
    warnings: list[str] = []
    if valid:
        ax.scatter(thetas, valid, s=2, color="tab:blue")
    else:
        warnings.append("scan has no valid beams")
    ax.set_rmax(rmax)
    ax.set_title(title or f"Laser scan at t={actual:.3f}", fontsize=10)
    png = _render(fig, width, height)
    w, h = png_dimensions(png)
    result = PlotResult(
        png, w, h,
        [_summarize("range", valid)],
        warnings,
        {
            "time": actual,
            "beam_count": len(ranges),
            "valid_count": len(valid),
        },
    )
    return result, note
