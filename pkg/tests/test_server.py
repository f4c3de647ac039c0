"""MCP conformance: lifecycle, tool surface, transports, schema gate."""

import base64
import dataclasses
import io
import json

import jsonschema
import pytest
from fastapi.testclient import TestClient

from bagpilot.mcp import registry
from bagpilot.mcp.content import extract_json_block
from bagpilot.mcp.http import create_app
from bagpilot.mcp.server import RpcServer
from bagpilot.mcp.stdio import serve_stdio
from bagpilot.store import Session

from fuzzutil import invalid_argument_cases

TABLE_DESCRIPTIONS = {
    "set_bag_path": "Set the path to a rosbag file or directory",
    "list_bags": "List all available rosbag files in the directory",
    "bag_info": "Retrieve bag metadata: topics, counts, duration",
    "get_message_at_time": "Get message from a topic at a specific timestamp",
    "get_messages_in_range": "Get all messages from a topic within a time range",
    "search_messages": "Search messages using conditions (regex, equals, etc.)",
    "filter_bag": "Create a filtered copy of a bag file by topic, time, or rate",
    "analyze_trajectory": "Compute trajectory metrics (distance, speed, waypoints)",
    "analyze_lidar_scan": "Analyze LiDAR scans for obstacles, gaps, statistics",
    "analyze_logs": "Parse/analyze ROS logs; filter by level or node",
    "get_tf_tree": "Get TF tree of coordinate frame relationships",
    "get_image_at_time": "Extract camera image at specific time (base64 JPEG)",
    "plot_timeseries": "Plot time series data with multiple styles",
    "plot_2d": "Create 2D trajectory plots (XY)",
    "plot_lidar_scan": "Visualize LiDAR scans as polar plots",
}

RANGE_SCHEMA_GOLDEN = {
    "type": "object",
    "properties": {
        "topic": {"type": "string", "description": "ROS topic name"},
        "start_time": {
            "type": "number",
            "description": "Start unix timestamp in seconds",
        },
        "end_time": {
            "type": "number",
            "description": "End unix timestamp in seconds",
        },
        "max_messages": {
            "type": "integer",
            "description": "Maximum messages to return (default: 100)",
        },
        "bag_path": {
            "type": "string",
            "description": "Optional: specific bag file or directory to search",
        },
    },
    "required": ["topic", "start_time", "end_time"],
}


def make_rpc(path=None) -> RpcServer:
    session = Session()
    if path is not None:
        session.set_bag_path(str(path))
    rpc = RpcServer(session)
    rpc.handle_envelope({"jsonrpc": "2.0", "id": 0, "method": "initialize",
                         "params": {}})
    rpc.handle_envelope({"jsonrpc": "2.0", "method": "notifications/initialized"})
    return rpc


def call(rpc, name, arguments, id_=1):
    return rpc.handle_envelope({
        "jsonrpc": "2.0", "id": id_, "method": "tools/call",
        "params": {"name": name, "arguments": arguments},
    })


# -- tool surface ----------------------------------------------------


def test_descriptor_names_and_descriptions():
    tools = registry.descriptors()
    assert len(tools) == 15
    assert {t["name"] for t in tools} == set(TABLE_DESCRIPTIONS)
    for t in tools:
        assert t["description"] == TABLE_DESCRIPTIONS[t["name"]]


def test_range_schema_golden():
    tool = registry.TOOLS_BY_NAME["get_messages_in_range"]
    assert tool.input_schema == RANGE_SCHEMA_GOLDEN
    assert list(tool.input_schema["properties"]) == [
        "topic", "start_time", "end_time", "max_messages", "bag_path",
    ]
    assert tool.input_schema["required"] == ["topic", "start_time", "end_time"]


def test_all_schemas_are_valid_json_schema():
    for tool in registry.TOOLS:
        jsonschema.Draft202012Validator.check_schema(tool.input_schema)
        required = set(tool.input_schema.get("required", []))
        assert required <= set(tool.input_schema["properties"])
        for prop in tool.input_schema["properties"].values():
            assert prop.get("description"), f"{tool.name} has an undescribed field"


# -- lifecycle -------------------------------------------------------


def test_lifecycle_gate():
    rpc = RpcServer(Session())
    r = rpc.handle_envelope({"jsonrpc": "2.0", "id": 1, "method": "tools/list"})
    assert r["error"]["code"] == -32002
    r = rpc.handle_envelope({"jsonrpc": "2.0", "id": 2, "method": "initialize",
                             "params": {}})
    assert r["result"]["protocolVersion"] == "2024-11-05"
    assert r["result"]["serverInfo"]["name"] == "rosbags-mcp-lite"
    r = rpc.handle_envelope({"jsonrpc": "2.0", "id": 3, "method": "initialize",
                             "params": {}})
    assert "error" in r
    assert rpc.initialized
    r = rpc.handle_envelope({"jsonrpc": "2.0", "id": 4, "method": "tools/list"})
    assert len(r["result"]["tools"]) == 15


def test_unknown_method():
    rpc = make_rpc()
    r = rpc.handle_envelope({"jsonrpc": "2.0", "id": 9, "method": "resources/list"})
    assert r["error"]["code"] == -32601


def test_notifications_get_no_response():
    rpc = make_rpc()
    assert rpc.handle_envelope({"jsonrpc": "2.0", "method": "tools/list"}) is None
    assert rpc.handle_envelope({"jsonrpc": "2.0", "method": "whatever/else"}) is None


def test_parse_error_keeps_serving():
    rpc = make_rpc()
    bad = json.loads(rpc.handle_json("{this is not json"))
    assert bad["error"]["code"] == -32700
    assert bad["id"] is None
    ok = json.loads(rpc.handle_json(json.dumps(
        {"jsonrpc": "2.0", "id": 5, "method": "tools/list"}
    )))
    assert len(ok["result"]["tools"]) == 15


def test_unknown_tool_is_transport_error():
    rpc = make_rpc()
    r = call(rpc, "teleport", {})
    assert r["error"]["code"] == -32601
    assert "teleport" in r["error"]["message"]


# -- schema gate -----------------------------------------------------


def test_fuzzed_arguments_yield_is_error_and_never_dispatch(monkeypatch, mixed_bag):
    cases = invalid_argument_cases()
    assert len(cases) >= 200
    executed: list[str] = []
    for tool in registry.TOOLS:
        def spy(session, args, _name=tool.name, _h=tool.handler):
            executed.append(_name)
            return _h(session, args)
        monkeypatch.setitem(
            registry.TOOLS_BY_NAME, tool.name,
            dataclasses.replace(tool, handler=spy),
        )
    rpc = make_rpc(mixed_bag)
    for name, args, offending in cases:
        r = call(rpc, name, args)
        result = r["result"]
        assert result["isError"] is True, (name, args)
        text = result["content"][0]["text"]
        assert f"'{offending}'" in text, (name, args, text)
    assert executed == []


def test_valid_arguments_do_dispatch(mixed_bag):
    rpc = make_rpc(mixed_bag)
    r = call(rpc, "bag_info", {})
    assert r["result"]["isError"] is False


def test_domain_failure_is_tool_error_not_transport(mixed_bag):
    rpc = make_rpc(mixed_bag)
    r = call(rpc, "bag_info", {"bag_path": "/no/such.bag"})
    result = r["result"]
    assert result["isError"] is True
    assert "does not exist" in result["content"][0]["text"]


def test_every_error_result_has_actionable_text(mixed_bag):
    rpc = make_rpc(mixed_bag)
    probes = [
        ("get_message_at_time", {"topic": "/ghost", "time": 0.0}),
        ("search_messages", {"topic": "/odom", "condition_type": "near_position",
                             "value": "1,2"}),
        ("analyze_trajectory", {"pose_topic": "/cmd_vel"}),
        ("filter_bag", {"output_path": str(mixed_bag)}),
    ]
    for name, args in probes:
        result = call(rpc, name, args)["result"]
        assert result["isError"] is True
        text = result["content"][0]["text"]
        assert text.strip(), name
        assert len(text) > 20, name


# -- behavior over the wire ------------------------------------------


def scripted_envelopes(fixture_dir):
    return [
        {"jsonrpc": "2.0", "id": 1, "method": "initialize", "params": {}},
        {"jsonrpc": "2.0", "method": "notifications/initialized"},
        {"jsonrpc": "2.0", "id": 2, "method": "tools/list"},
        {"jsonrpc": "2.0", "id": 3, "method": "tools/call",
         "params": {"name": "set_bag_path", "arguments": {"path": str(fixture_dir)}}},
        {"jsonrpc": "2.0", "id": 4, "method": "tools/call",
         "params": {"name": "list_bags", "arguments": {}}},
        {"jsonrpc": "2.0", "id": 5, "method": "tools/call",
         "params": {"name": "bag_info",
                    "arguments": {"bag_path": str(fixture_dir / "mixed.bag")}}},
    ]


def run_stdio(envelopes):
    rpc = RpcServer(Session())
    stdin = io.StringIO("".join(json.dumps(e) + "\n" for e in envelopes))
    stdout = io.StringIO()
    serve_stdio(rpc, stdin, stdout)
    return [json.loads(line) for line in stdout.getvalue().splitlines()]


def test_stdio_golden_transcript(fixture_dir):
    responses = run_stdio(scripted_envelopes(fixture_dir))
    assert [r["id"] for r in responses] == [1, 2, 3, 4, 5]
    assert responses[0]["result"]["serverInfo"] == {
        "name": "rosbags-mcp-lite", "version": "0.1.0",
    }
    assert len(responses[1]["result"]["tools"]) == 15
    ack = extract_json_block(responses[2]["result"]["content"][0]["text"])
    assert ack["kind"] == "directory" and ack["bag_count"] == 5
    bags = extract_json_block(responses[3]["result"]["content"][0]["text"])
    assert [b["name"] for b in bags["bags"]] == [
        "circle.bag", "mixed.bag", "pillar.bag", "straight_line.bag",
        "two_topic.bag",
    ]
    info = extract_json_block(responses[4]["result"]["content"][0]["text"])
    assert info["duration"] == pytest.approx(30.0, abs=1e-6)
    assert {t["topic"] for t in info["topics"]} == {
        "/odom", "/cmd_vel", "/scan", "/tf", "/tf_static", "/rosout",
        "/camera/image/compressed",
    }


def test_http_equals_stdio(fixture_dir):
    envelopes = scripted_envelopes(fixture_dir)
    stdio_responses = run_stdio(envelopes)

    rpc = RpcServer(Session())
    app = create_app(rpc)
    http_responses = []
    with TestClient(app) as client:
        for envelope in envelopes:
            reply = client.post("/rpc", json=envelope)
            if reply.status_code == 204:
                continue
            http_responses.append(reply.json())
    assert http_responses == stdio_responses


def test_http_healthz(fixture_dir):
    app = create_app(RpcServer(Session()))
    with TestClient(app) as client:
        reply = client.get("/healthz")
        assert reply.status_code == 200
        assert reply.text == "ok"


def test_http_parse_error(fixture_dir):
    app = create_app(RpcServer(Session()))
    with TestClient(app) as client:
        reply = client.post("/rpc", content=b"][garbage")
        assert reply.json()["error"]["code"] == -32700


def test_stdio_sequential_order(fixture_dir):
    envelopes = [{"jsonrpc": "2.0", "id": 0, "method": "initialize", "params": {}}]
    envelopes += [
        {"jsonrpc": "2.0", "id": i, "method": "tools/list"} for i in range(1, 6)
    ]
    responses = run_stdio(envelopes)
    assert [r["id"] for r in responses] == [0, 1, 2, 3, 4, 5]


def test_stdio_garbage_line_recovers(fixture_dir):
    rpc = RpcServer(Session())
    stdin = io.StringIO(
        json.dumps({"jsonrpc": "2.0", "id": 1, "method": "initialize",
                    "params": {}}) + "\n"
        + "not json at all\n"
        + json.dumps({"jsonrpc": "2.0", "id": 2, "method": "tools/list"}) + "\n"
    )
    stdout = io.StringIO()
    serve_stdio(rpc, stdin, stdout)
    out = [json.loads(line) for line in stdout.getvalue().splitlines()]
    assert out[1]["error"]["code"] == -32700
    assert len(out[2]["result"]["tools"]) == 15


# -- content contracts -----------------------------------------------


def test_search_examples_box_contract(mixed_bag):
    rpc = make_rpc(mixed_bag)
    result = call(rpc, "search_messages", {
        "topic": "/odom", "condition_type": "near_position",
        "value": "2,-2,0.5", "limit": 10,
    })["result"]
    assert result["isError"] is False
    text = result["content"][0]["text"]
    assert "closest approach" in text
    payload = extract_json_block(text)
    approach = payload["closest_approach"]
    assert {"distance", "x", "y", "time"} <= set(approach)


def test_plot_returns_text_then_png(mixed_bag):
    rpc = make_rpc(mixed_bag)
    result = call(rpc, "plot_timeseries", {
        "fields": ["cmd_vel.linear.x", "odom.twist.twist.linear.x"],
    })["result"]
    assert result["isError"] is False
    kinds = [b["type"] for b in result["content"]]
    assert kinds == ["text", "image"]
    assert "time series plot" in result["content"][0]["text"]
    image = result["content"][1]
    assert image["mimeType"] == "image/png"
    raw = base64.b64decode(image["data"])
    assert raw[:8] == b"\x89PNG\r\n\x1a\n"


def test_image_tool_returns_image_block(mixed_bag):
    rpc = make_rpc(mixed_bag)
    result = call(rpc, "get_image_at_time", {
        "image_topic": "/camera/image/compressed", "time": 1_700_000_003.0,
    })["result"]
    assert result["isError"] is False
    image = result["content"][1]
    assert image["type"] == "image"
    assert image["mimeType"] == "image/png"
    assert base64.b64decode(image["data"])[:8] == b"\x89PNG\r\n\x1a\n"


def test_results_embed_json_blocks(mixed_bag):
    rpc = make_rpc(mixed_bag)
    for name, args in [
        ("bag_info", {}),
        ("analyze_trajectory", {"pose_topic": "/odom"}),
        ("get_tf_tree", {}),
        ("analyze_logs", {}),
    ]:
        result = call(rpc, name, args)["result"]
        assert result["isError"] is False, name
        assert extract_json_block(result["content"][0]["text"]) is not None, name
