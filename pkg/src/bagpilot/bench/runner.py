"""Task execution and scoring.

The harness talks to the server only through the MCP client, so every
run doubles as an end-to-end integration test. Success mirrors the
required-tools bookkeeping: full when exactly the required tools ran
cleanly (and any success check passes), partial when extras were used,
fail otherwise.
"""

import time
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import AgentTransport
from ..mcp.client import McpClient, McpRpcError
from ..mcp.content import extract_json_block
from .agents import HttpChatAgent, ScriptedAgent
from .tasks import SuccessCheck, TaskSpec

MAX_ROUNDS = 12


@dataclass
class CallRecord:
    tool: str
    arguments: dict
    latency_ms: float
    is_error: bool
    result_text: str


@dataclass
class TaskResult:
    task_id: str
    calls: list[CallRecord] = field(default_factory=list)
    total_latency_ms: float = 0.0
    success: str = "fail"
    answer: str = ""
    capped: bool = False
    failure_reason: str | None = None

    @property
    def tool_count(self) -> int:
        return len(self.calls)


def _result_text(result: dict) -> str:
    return "\n".join(
        block.get("text", "")
        for block in result.get("content", [])
        if block.get("type") == "text"
    )


class _Recorder:
    """Times and logs every tools/call issued for one task."""

    def __init__(self, client: McpClient):
        self.client = client
        self.calls: list[CallRecord] = []

    def call(self, name: str, arguments: dict) -> str:
        t0 = time.perf_counter()
        try:
            result = self.client.call_tool(name, arguments)
            is_error = bool(result.get("isError"))
            text = _result_text(result)
        except McpRpcError as exc:
            is_error = True
            text = str(exc)
        latency_ms = (time.perf_counter() - t0) * 1000.0
        self.calls.append(CallRecord(name, arguments, latency_ms, is_error, text))
        return text


def check_passes(check: SuccessCheck | None, calls: list[CallRecord]) -> bool:
    if check is None:
        return True
    if check.kind == "file_exists":
        return Path(check.path or "").exists()
    # json_field_near: the last tool result that carries the field wins
    found = None
    for call in calls:
        payload = extract_json_block(call.result_text)
        if payload is None:
            continue
        node = payload
        for seg in (check.field or "").split("."):
            if isinstance(node, dict) and seg in node:
                node = node[seg]
            else:
                node = None
                break
        if isinstance(node, (int, float)):
            found = float(node)
    if found is None:
        return False
    return abs(found - (check.value or 0.0)) <= check.tol


def evaluate(task: TaskSpec, calls: list[CallRecord], capped: bool = False) -> str:
    """Pure classification: full / partial / fail."""
    if capped:
        return "fail"
    ok_names = {c.tool for c in calls if not c.is_error}
    all_names = {c.tool for c in calls}
    if not task.required_tools <= ok_names:
        return "fail"
    if not check_passes(task.success_check, calls):
        return "fail"
    return "partial" if all_names - task.required_tools else "full"


def run_task(task: TaskSpec, agent, client: McpClient) -> TaskResult:
    recorder = _Recorder(client)
    result = TaskResult(task_id=task.id)
    t0 = time.perf_counter()
    try:
        if isinstance(agent, ScriptedAgent):
            plan = agent.plan(task)
            result.capped = len(plan) > MAX_ROUNDS
            for call in plan[:MAX_ROUNDS]:
                recorder.call(call.tool, call.arguments)
            result.answer = agent.answer(task)
        elif isinstance(agent, HttpChatAgent):
            tools = client.tools_list()
            result.answer, result.capped = agent.run(task, tools, recorder.call)
        else:
            raise TypeError(f"unknown agent type {type(agent).__name__}")
    except AgentTransport as exc:
        result.failure_reason = str(exc)
    result.total_latency_ms = (time.perf_counter() - t0) * 1000.0
    result.calls = recorder.calls
    if result.failure_reason is None:
        result.success = evaluate(task, result.calls, result.capped)
    else:
        result.success = "fail"
    return result


def run_suite(tasks: list[TaskSpec], agent, client: McpClient) -> list[TaskResult]:
    return [run_task(task, agent, client) for task in tasks]
