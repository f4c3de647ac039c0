"""Harness: suite loading, scoring, scripted end-to-end runs, reports."""

import csv
import json
import threading

import pytest
import uvicorn
from fastapi import FastAPI
from fastapi.testclient import TestClient

from bagpilot.bench import (
    SCRIPTED_AGENTS,
    CallRecord,
    HttpChatAgent,
    SuccessCheck,
    TaskSpec,
    evaluate,
    export_report,
    load_tasks,
    parse_suite,
    run_suite,
    run_task,
)
from bagpilot.errors import IoFailure, MalformedSuite, UnknownRequiredTool
from bagpilot.mcp.client import McpClient
from bagpilot.mcp.embedded import EmbeddedServer


@pytest.fixture(scope="module")
def bench_bags(tmp_path_factory):
    """Private fixture dir: the filter task writes its output here."""
    from bagpilot.synth import generate

    bags = tmp_path_factory.mktemp("bench_bags")
    generate("mixed", bags / "mixed.bag")
    return bags


@pytest.fixture(scope="module")
def server(bench_bags):
    with EmbeddedServer(bags=str(bench_bags)) as embedded:
        yield embedded


@pytest.fixture(scope="module")
def client(server):
    with McpClient(base_url=server.url) as c:
        c.initialize()
        yield c


@pytest.fixture(scope="module")
def default_tasks(bench_bags):
    return load_tasks("default", str(bench_bags))


# -- suite loading ---------------------------------------------------


def test_default_suite_shape(default_tasks):
    assert len(default_tasks) == 10
    assert default_tasks[0].required_tools == frozenset({"list_bags"})
    assert default_tasks[-1].required_tools == frozenset({
        "get_messages_in_range", "get_message_at_time",
    })
    by_id = {t.id: t for t in default_tasks}
    assert by_id["filter-bag"].success_check.kind == "file_exists"
    near = by_id["trajectory-summary"].success_check
    assert near.kind == "json_field_near"
    assert near.value > 0


def test_unknown_required_tool():
    doc = {"tasks": [{
        "id": "x", "prompt": "p", "required_tools": ["teleport"], "bag": "b",
    }]}
    with pytest.raises(UnknownRequiredTool):
        parse_suite(doc)


def test_malformed_suite():
    with pytest.raises(MalformedSuite):
        parse_suite({"nope": []})
    with pytest.raises(MalformedSuite):
        parse_suite({"tasks": [{"id": "a"}]})
    with pytest.raises(MalformedSuite):
        parse_suite({"tasks": [
            {"id": "a", "prompt": "p", "required_tools": ["bag_info"], "bag": "b",
             "success_check": {"kind": "mystery"}},
        ]})


# -- evaluate --------------------------------------------------------


def rec(tool, is_error=False):
    return CallRecord(tool, {}, 1.0, is_error, "")


def task_requiring(*tools, check=None):
    return TaskSpec("t", "p", frozenset(tools), "bag", check)


def test_evaluate_full():
    assert evaluate(task_requiring("plot_timeseries"),
                    [rec("plot_timeseries")]) == "full"


def test_evaluate_fail_when_missing():
    task = task_requiring("analyze_lidar_scan", "search_messages")
    assert evaluate(task, [rec("analyze_lidar_scan")]) == "fail"


def test_evaluate_partial_with_extras():
    task = task_requiring("plot_2d")
    calls = [rec("analyze_trajectory"), rec("plot_2d")]
    assert evaluate(task, calls) == "partial"


def test_evaluate_error_calls_do_not_cover():
    task = task_requiring("bag_info")
    assert evaluate(task, [rec("bag_info", is_error=True)]) == "fail"


def test_evaluate_ordering_invariant():
    task = task_requiring("plot_2d")
    calls = [rec("plot_2d"), rec("analyze_trajectory")]
    assert evaluate(task, calls) == "partial"
    assert evaluate(task, list(reversed(calls))) == "partial"


def test_evaluate_capped_fails():
    task = task_requiring("bag_info")
    assert evaluate(task, [rec("bag_info")], capped=True) == "fail"


def test_evaluate_repeat_calls_still_full():
    task = task_requiring("bag_info")
    assert evaluate(task, [rec("bag_info"), rec("bag_info")]) == "full"


def test_evaluate_lazy_fails():
    assert evaluate(task_requiring("list_bags"), []) == "fail"


def test_evaluate_check_gate(tmp_path):
    check = SuccessCheck("file_exists", path=str(tmp_path / "missing.bag"))
    task = task_requiring("filter_bag", check=check)
    assert evaluate(task, [rec("filter_bag")]) == "fail"
    (tmp_path / "missing.bag").write_bytes(b"")
    assert evaluate(task, [rec("filter_bag")]) == "full"


# -- scripted end-to-end ---------------------------------------------


def test_perfect_agent_full_marks(default_tasks, client):
    results = run_suite(default_tasks, SCRIPTED_AGENTS["perfect"](), client)
    assert [r.success for r in results] == ["full"] * 10
    for result, task in zip(results, default_tasks):
        assert {c.tool for c in result.calls} == task.required_tools
        assert result.tool_count == len(result.calls)


def test_verbose_agent_partial(default_tasks, client):
    results = run_suite(default_tasks, SCRIPTED_AGENTS["verbose"](), client)
    assert [r.success for r in results] == ["partial"] * 10


def test_lazy_agent_fails(default_tasks, client):
    results = run_suite(default_tasks, SCRIPTED_AGENTS["lazy"](), client)
    assert [r.success for r in results] == ["fail"] * 10
    assert all(r.tool_count == 0 for r in results)


def strip_latency(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    drop = [i for i, col in enumerate(rows[0]) if "latency" in col]
    return [
        [c for i, c in enumerate(row) if i not in drop]
        for row in rows
    ]


def test_csv_determinism(default_tasks, client, tmp_path):
    agent = SCRIPTED_AGENTS["perfect"]()
    a = run_suite(default_tasks, agent, client)
    b = run_suite(default_tasks, agent, client)
    export_report(a, tmp_path / "a")
    export_report(b, tmp_path / "b")
    for name in ("calls.csv", "tasks.csv"):
        assert strip_latency(tmp_path / "a" / name) == strip_latency(
            tmp_path / "b" / name
        )


def test_export_report_contents(default_tasks, client, tmp_path):
    results = run_suite(default_tasks, SCRIPTED_AGENTS["perfect"](), client)
    paths = export_report(results, tmp_path / "out")
    with open(paths["calls"], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["task_id", "tool", "latency_ms", "is_error"]
    assert len(rows) - 1 == sum(r.tool_count for r in results)
    with open(paths["tasks"], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["task_id", "success", "total_latency_ms", "tool_count"]
    assert len(rows) - 1 == 10
    summary = paths["summary"].read_text()
    assert "full: 10 (100.0%)" in summary


def test_export_empty_errors(tmp_path):
    with pytest.raises(IoFailure):
        export_report([], tmp_path)


# -- http chat adapter against a mock provider ------------------------


def make_mock_provider(script):
    """OpenAI-compatible endpoint returning scripted assistant turns."""
    app = FastAPI()
    state = {"i": 0}

    @app.post("/v1/chat/completions")
    async def completions(body: dict):
        turn = script[min(state["i"], len(script) - 1)]
        state["i"] += 1
        return {"choices": [{"message": turn}]}

    return app


def test_http_chat_agent_loop(default_tasks, client, monkeypatch):
    script = [
        {
            "role": "assistant",
            "content": None,
            "tool_calls": [{
                "id": "call_1",
                "type": "function",
                "function": {"name": "list_bags", "arguments": "{}"},
            }],
        },
        {"role": "assistant", "content": "There are five bags."},
    ]
    provider_app = make_mock_provider(script)
    provider_client = TestClient(provider_app)

    def fake_post(url, json=None, headers=None, timeout=None):
        return provider_client.post("/v1/chat/completions", json=json)

    import bagpilot.bench.agents as agents_mod
    monkeypatch.setattr(agents_mod.httpx, "post", fake_post)

    agent = HttpChatAgent(endpoint="http://mock/v1/chat/completions", model="mock")
    task = default_tasks[0]
    result = run_task(task, agent, client)
    assert result.success == "full"
    assert [c.tool for c in result.calls] == ["list_bags"]
    assert result.answer == "There are five bags."
    assert not result.capped


def test_http_chat_agent_round_cap(default_tasks, client, monkeypatch):
    looping = [{
        "role": "assistant",
        "content": None,
        "tool_calls": [{
            "id": "c",
            "type": "function",
            "function": {"name": "bag_info", "arguments": "{}"},
        }],
    }]
    provider_client = TestClient(make_mock_provider(looping))

    def fake_post(url, json=None, headers=None, timeout=None):
        return provider_client.post("/v1/chat/completions", json=json)

    import bagpilot.bench.agents as agents_mod
    monkeypatch.setattr(agents_mod.httpx, "post", fake_post)

    agent = HttpChatAgent(endpoint="http://mock", model="mock", max_rounds=4)
    result = run_task(default_tasks[0], agent, client)
    assert result.capped
    assert result.success == "fail"
    assert result.tool_count == 4
