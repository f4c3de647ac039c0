"""Tool-calling benchmark harness: task suite, agents, runner, reports."""

from .agents import SCRIPTED_AGENTS, HttpChatAgent, PlannedCall, ScriptedAgent
from .report import export_report, render_summary
from .runner import CallRecord, TaskResult, check_passes, evaluate, run_suite, run_task
from .tasks import SuccessCheck, TaskSpec, filtered_output_path, load_tasks, parse_suite

__all__ = [
    "CallRecord",
    "HttpChatAgent",
    "PlannedCall",
    "SCRIPTED_AGENTS",
    "ScriptedAgent",
    "SuccessCheck",
    "TaskResult",
    "TaskSpec",
    "check_passes",
    "evaluate",
    "export_report",
    "filtered_output_path",
    "load_tasks",
    "parse_suite",
    "render_summary",
    "run_suite",
    "run_task",
]
