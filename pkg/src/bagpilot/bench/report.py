"""Result export: per-call and per-task CSVs plus a text summary.

The CSVs are the raw material for latency / tool-count distribution
plots; everything except the latency columns is byte-stable across
runs of the scripted agents.
"""

import csv
import statistics
from pathlib import Path

from ..errors import IoFailure
from .runner import TaskResult

CALLS_CSV = "calls.csv"
TASKS_CSV = "tasks.csv"
SUMMARY_TXT = "summary.txt"


def export_report(results: list[TaskResult], out_dir: str | Path) -> dict[str, Path]:
    if not results:
        raise IoFailure("nothing to export: empty result set")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    calls_path = out / CALLS_CSV
    with open(calls_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["task_id", "tool", "latency_ms", "is_error"])
        for result in results:
            for call in result.calls:
                writer.writerow([
                    result.task_id, call.tool,
                    f"{call.latency_ms:.3f}", str(call.is_error).lower(),
                ])

    tasks_path = out / TASKS_CSV
    with open(tasks_path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["task_id", "success", "total_latency_ms", "tool_count"])
        for result in results:
            writer.writerow([
                result.task_id, result.success,
                f"{result.total_latency_ms:.3f}", result.tool_count,
            ])

    summary_path = out / SUMMARY_TXT
    with open(summary_path, "w", encoding="utf-8") as f:
        f.write(render_summary(results))

    return {"calls": calls_path, "tasks": tasks_path, "summary": summary_path}


def render_summary(results: list[TaskResult]) -> str:
    n = len(results)
    full = sum(1 for r in results if r.success == "full")
    partial = sum(1 for r in results if r.success == "partial")
    failed = sum(1 for r in results if r.success == "fail")
    latencies = sorted(r.total_latency_ms for r in results)
    median = statistics.median(latencies)
    q1 = latencies[max(0, (n - 1) // 4)]
    q3 = latencies[min(n - 1, (3 * (n - 1)) // 4)]
    counts: dict[int, int] = {}
    for r in results:
        counts[r.tool_count] = counts.get(r.tool_count, 0) + 1
    lines = [
        f"tasks: {n}",
        f"full: {full} ({100.0 * full / n:.1f}%)",
        f"partial: {partial}",
        f"fail: {failed}",
        f"task latency ms: median {median:.1f}, IQR [{q1:.1f}, {q3:.1f}]",
        "tool-count distribution: " + ", ".join(
            f"{k} call(s) x {counts[k]}" for k in sorted(counts)
        ),
    ]
    for r in results:
        flag = "" if r.failure_reason is None else f"  ({r.failure_reason})"
        lines.append(
            f"  {r.task_id}: {r.success}, {r.tool_count} call(s), "
            f"{r.total_latency_ms:.1f} ms{flag}"
        )
    return "\n".join(lines) + "\n"
