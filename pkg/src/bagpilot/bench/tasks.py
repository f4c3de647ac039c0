"""Task suite loading.

A suite is a JSON document with a "tasks" array. Prompts carry the
concrete values agents need (timestamps, positions); ${BAGS} expands
to the fixture directory and ${TRUTH:<bag>:<key>} pulls a value out of
a fixture's sidecar truth file.
"""

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..errors import MalformedSuite, UnknownRequiredTool
from ..mcp.registry import TOOL_NAMES

DEFAULT_SUITE_RESOURCE = "default_suite.json"

CHECK_KINDS = ("none", "file_exists", "json_field_near")


@dataclass(frozen=True)
class SuccessCheck:
    kind: str
    path: str | None = None
    field: str | None = None
    value: float | None = None
    tol: float = 0.0


@dataclass(frozen=True)
class TaskSpec:
    id: str
    prompt: str
    required_tools: frozenset[str]
    bag: str
    success_check: SuccessCheck | None = None


_TRUTH_RE = re.compile(r"^\$\{TRUTH:([^:}]+):([^}]+)\}$")


def _substitute(text: str, bags_dir: str | None) -> str:
    if "${BAGS}" in text:
        if bags_dir is None:
            raise MalformedSuite(
                "suite uses ${BAGS} but no fixture directory was given"
            )
        text = text.replace("${BAGS}", str(bags_dir).rstrip("/"))
    return text


def _resolve_value(raw, bags_dir: str | None) -> float:
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, str):
        m = _TRUTH_RE.match(raw)
        if m:
            if bags_dir is None:
                raise MalformedSuite(
                    "suite uses ${TRUTH:...} but no fixture directory was given"
                )
            bag, key = m.groups()
            sidecar = Path(bags_dir) / Path(bag).with_suffix(".truth.json").name
            try:
                with open(sidecar, "r", encoding="utf-8") as f:
                    truth = json.load(f)
                return float(truth[key])
            except (OSError, KeyError, ValueError) as exc:
                raise MalformedSuite(
                    f"cannot resolve {raw}: {exc} (is the fixture generated?)"
                ) from exc
        try:
            return float(raw)
        except ValueError:
            pass
    raise MalformedSuite(f"success_check value {raw!r} is not a number")


def _parse_check(obj, bags_dir: str | None) -> SuccessCheck | None:
    if obj is None:
        return None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise MalformedSuite(f"bad success_check: {obj!r}")
    kind = obj["kind"]
    if kind not in CHECK_KINDS:
        raise MalformedSuite(
            f"unknown success_check kind {kind!r}; valid: {', '.join(CHECK_KINDS)}"
        )
    if kind == "none":
        return None
    if kind == "file_exists":
        if "path" not in obj:
            raise MalformedSuite("file_exists check needs a path")
        return SuccessCheck("file_exists", path=_substitute(obj["path"], bags_dir))
    for key in ("field", "value", "tol"):
        if key not in obj:
            raise MalformedSuite(f"json_field_near check needs {key!r}")
    return SuccessCheck(
        "json_field_near",
        field=obj["field"],
        value=_resolve_value(obj["value"], bags_dir),
        tol=float(obj["tol"]),
    )


def parse_suite(doc: dict, bags_dir: str | None = None) -> list[TaskSpec]:
    if not isinstance(doc, dict) or not isinstance(doc.get("tasks"), list):
        raise MalformedSuite("suite document needs a 'tasks' array")
    tasks: list[TaskSpec] = []
    seen_ids: set[str] = set()
    for i, row in enumerate(doc["tasks"]):
        if not isinstance(row, dict):
            raise MalformedSuite(f"task {i} is not an object")
        try:
            task_id = row["id"]
            prompt = _substitute(row["prompt"], bags_dir)
            required = row["required_tools"]
            bag = _substitute(row["bag"], bags_dir)
        except KeyError as exc:
            raise MalformedSuite(f"task {i} is missing {exc}") from None
        if task_id in seen_ids:
            raise MalformedSuite(f"duplicate task id {task_id!r}")
        seen_ids.add(task_id)
        if not isinstance(required, list) or not required:
            raise MalformedSuite(f"task {task_id}: required_tools must be a list")
        unknown = [t for t in required if t not in TOOL_NAMES]
        if unknown:
            raise UnknownRequiredTool(
                f"task {task_id}: unknown required tool(s) {', '.join(unknown)}"
            )
        tasks.append(TaskSpec(
            id=task_id,
            prompt=prompt,
            required_tools=frozenset(required),
            bag=bag,
            success_check=_parse_check(row.get("success_check"), bags_dir),
        ))
    return tasks


def load_tasks(path: str | Path | None, bags_dir: str | None = None) -> list[TaskSpec]:
    """Load a suite file; None (or "default") loads the shipped suite."""
    if path is None or str(path) == "default":
        text = (
            resources.files("bagpilot.bench") / DEFAULT_SUITE_RESOURCE
        ).read_text(encoding="utf-8")
    else:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedSuite(f"suite is not valid JSON: {exc}") from exc
    return parse_suite(doc, bags_dir)


def filtered_output_path(bag: str) -> str:
    """Canonical output path for the filter task (suite and agents agree)."""
    p = Path(bag)
    return str(p.with_name(p.stem + "_filtered.bag"))
