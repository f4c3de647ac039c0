"""Agent adapters.

Scripted agents are deterministic prompt->tool-call mappings used to
verify the harness itself. The http_chat adapter speaks the
OpenAI-compatible chat-completions wire format with tool definitions
derived from tools/list, so real models can be plugged in.
"""

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import httpx

from ..errors import AgentTransport
from .tasks import TaskSpec, filtered_output_path

_TIME_RANGE_RE = re.compile(r"from t=([0-9.]+)s to t=([0-9.]+)s")
_BETWEEN_RE = re.compile(r"between ([0-9.]+)-([0-9.]+)s")
_POSITION_RE = re.compile(r"\(x=([\-0-9.]+),\s*y=([\-0-9.]+)\)")
_RADIUS_RE = re.compile(r"within ([0-9.]+) meters")
_ANCHOR_RE = re.compile(r"(?:when|around) t=([0-9.]+)s")
_IN_DIR_RE = re.compile(r"\bin (\S+)\s*\??\s*$")


@dataclass
class PlannedCall:
    tool: str
    arguments: dict


@dataclass
class ScriptedAgent:
    """Deterministic mapping from Table-style prompts to tool calls."""

    name: str = "perfect"
    extra_tool: str | None = None  # prepended per task by the verbose agent
    lazy: bool = False

    def plan(self, task: TaskSpec) -> list[PlannedCall]:
        if self.lazy:
            return []
        calls = self._base_plan(task)
        if self.extra_tool and calls:
            if task.required_tools == frozenset({"plot_2d"}):
                # the classic "plot needs analysis first" detour
                decoration = PlannedCall(
                    "analyze_trajectory",
                    {"pose_topic": "/odom", "bag_path": task.bag},
                )
            else:
                decoration = PlannedCall(self.extra_tool, {"bag_path": task.bag})
            calls = [decoration] + calls
        return calls

    def answer(self, task: TaskSpec) -> str:
        if self.lazy:
            return "I believe I can answer without consulting the bag."
        return f"Done with task {task.id}; see the tool results above."

    def _base_plan(self, task: TaskSpec) -> list[PlannedCall]:
        prompt = task.prompt
        low = prompt.lower()
        bag = task.bag

        if "what bags" in low:
            m = _IN_DIR_RE.search(prompt)
            args = {"path": m.group(1)} if m else {}
            return [PlannedCall("list_bags", args)]

        if "plot the velocity" in low:
            m = _TIME_RANGE_RE.search(prompt)
            args: dict = {
                "fields": [
                    "cmd_vel.linear.x", "odom.twist.twist.linear.x",
                    "cmd_vel.angular.z", "odom.twist.twist.angular.z",
                ],
                "title": "Commanded vs actual velocities",
                "bag_path": bag,
            }
            if m:
                args["start_time"] = float(m.group(1))
                args["end_time"] = float(m.group(2))
            return [PlannedCall("plot_timeseries", args)]

        if "trajectory summary" in low:
            return [PlannedCall(
                "analyze_trajectory", {"pose_topic": "/odom", "bag_path": bag}
            )]

        if "plot the trajectory" in low:
            return [PlannedCall(
                "plot_2d", {"pose_topic": "/odom", "bag_path": bag}
            )]

        if "lidar" in low and "obstacle" in low:
            anchor = _ANCHOR_RE.search(prompt)
            position = _POSITION_RE.search(prompt)
            radius = _RADIUS_RE.search(prompt)
            calls = [PlannedCall("analyze_lidar_scan", {
                "scan_topic": "/scan",
                "time": float(anchor.group(1)) if anchor else 0.0,
                "bag_path": bag,
            })]
            if position and radius:
                value = f"{position.group(1)},{position.group(2)},{radius.group(1)}"
            else:
                value = "0,0,1.0"
            calls.append(PlannedCall("search_messages", {
                "topic": "/odom",
                "condition_type": "near_position",
                "value": value,
                "limit": 10,
                "bag_path": bag,
            }))
            return calls

        if "plot the lidar scan" in low:
            anchor = _ANCHOR_RE.search(prompt)
            calls = [PlannedCall("plot_lidar_scan", {
                "scan_topic": "/scan",
                "time": float(anchor.group(1)) if anchor else 0.0,
                "bag_path": bag,
            })]
            if "histogram" in low:
                calls.append(PlannedCall("plot_timeseries", {
                    "fields": ["cmd_vel.linear.x"],
                    "style": "histogram",
                    "bag_path": bag,
                }))
            return calls

        if "passed close by this position" in low:
            position = _POSITION_RE.search(prompt)
            radius = _RADIUS_RE.search(prompt)
            if not (position and radius):
                return []
            value = f"{position.group(1)},{position.group(2)},{radius.group(1)}"
            return [PlannedCall("search_messages", {
                "topic": "/odom",
                "condition_type": "near_position",
                "value": value,
                "limit": 10,
                "bag_path": bag,
            })]

        if "frames" in low and "relationship" in low:
            return [PlannedCall("get_tf_tree", {"bag_path": bag})]

        if "filter the rosbag" in low:
            return [PlannedCall("filter_bag", {
                "topics": ["/cmd_vel", "/odom"],
                "output_path": filtered_output_path(bag),
                "bag_path": bag,
            })]

        if "maximum commanded" in low:
            m = _BETWEEN_RE.search(prompt)
            start = float(m.group(1)) if m else 0.0
            end = float(m.group(2)) if m else 0.0
            return [
                PlannedCall("get_messages_in_range", {
                    "topic": "/cmd_vel",
                    "start_time": start,
                    "end_time": end,
                    "max_messages": 500,
                    "bag_path": bag,
                }),
                PlannedCall("get_message_at_time", {
                    "topic": "/odom",
                    "time": start,
                    "bag_path": bag,
                }),
            ]

        return []


def perfect_agent() -> ScriptedAgent:
    return ScriptedAgent(name="perfect")


def verbose_agent() -> ScriptedAgent:
    return ScriptedAgent(name="verbose", extra_tool="bag_info")


def lazy_agent() -> ScriptedAgent:
    return ScriptedAgent(name="lazy", lazy=True)


SCRIPTED_AGENTS = {
    "perfect": perfect_agent,
    "verbose": verbose_agent,
    "lazy": lazy_agent,
}


@dataclass
class HttpChatAgent:
    """Tool-calling loop against an OpenAI-compatible chat endpoint."""

    endpoint: str
    model: str
    api_key_env: str | None = None
    max_rounds: int = 12
    temperature: float = 0.0
    name: str = "http_chat"
    extra_headers: dict = field(default_factory=dict)

    @classmethod
    def from_config(cls, path: str) -> "HttpChatAgent":
        with open(path, "r", encoding="utf-8") as f:
            cfg = json.load(f)
        return cls(
            endpoint=cfg["endpoint"],
            model=cfg["model"],
            api_key_env=cfg.get("api_key_env"),
            max_rounds=int(cfg.get("max_rounds", 12)),
            temperature=float(cfg.get("temperature", 0.0)),
            name=cfg.get("name", cfg["model"]),
        )

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json", **self.extra_headers}
        if self.api_key_env:
            key = os.environ.get(self.api_key_env)
            if not key:
                raise AgentTransport(
                    f"API key environment variable {self.api_key_env} is empty"
                )
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def run(self, task: TaskSpec, tools: list[dict], call_tool) -> tuple[str, bool]:
        """Drive the chat loop; returns (final answer, hit_round_cap).

        call_tool(name, arguments) executes one MCP tool call and
        returns its text rendering (isError results included, so the
        model can self-correct).
        """
        tool_defs = [
            {
                "type": "function",
                "function": {
                    "name": t["name"],
                    "description": t["description"],
                    "parameters": t["inputSchema"],
                },
            }
            for t in tools
        ]
        bag_note = (
            f"The bag under discussion is {task.bag}; pass it as bag_path "
            "when a tool accepts one."
            if Path(task.bag).suffix else
            f"The bag directory under discussion is {task.bag}."
        )
        messages: list[dict] = [
            {
                "role": "system",
                "content": "You analyze robot log (rosbag) data strictly "
                           "through the provided tools. " + bag_note,
            },
            {"role": "user", "content": task.prompt},
        ]
        for _ in range(self.max_rounds):
            message = self._chat(messages, tool_defs)
            tool_calls = message.get("tool_calls") or []
            if not tool_calls:
                return message.get("content") or "", False
            messages.append(message)
            for tc in tool_calls:
                fn = tc.get("function", {})
                try:
                    arguments = json.loads(fn.get("arguments") or "{}")
                except json.JSONDecodeError:
                    arguments = {}
                text = call_tool(fn.get("name", ""), arguments)
                messages.append({
                    "role": "tool",
                    "tool_call_id": tc.get("id", ""),
                    "content": text,
                })
        return "", True

    def _chat(self, messages: list[dict], tool_defs: list[dict]) -> dict:
        body = {
            "model": self.model,
            "messages": messages,
            "tools": tool_defs,
            "temperature": self.temperature,
        }
        try:
            response = httpx.post(
                self.endpoint, json=body, headers=self._headers(), timeout=120.0
            )
            response.raise_for_status()
            return response.json()["choices"][0]["message"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise AgentTransport(f"chat endpoint failed: {exc}") from exc
