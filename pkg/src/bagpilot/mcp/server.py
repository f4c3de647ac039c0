"""JSON-RPC 2.0 core implementing the MCP lifecycle.

One server instance serves one session; envelope handling is
serialized with a lock so concurrent transports still process tool
calls strictly sequentially. Domain failures are isError tool results;
JSON-RPC errors are reserved for transport-level problems.
"""

import json
import logging
import threading

from .. import __version__
from ..store import Session
from . import registry

logger = logging.getLogger("bagpilot.mcp")

PROTOCOL_VERSION = "2024-11-05"
SERVER_NAME = "rosbags-mcp-lite"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602
NOT_INITIALIZED = -32002


def _error(id_, code: int, message: str) -> dict:
    return {"jsonrpc": "2.0", "id": id_, "error": {"code": code, "message": message}}


def _result(id_, result: dict) -> dict:
    return {"jsonrpc": "2.0", "id": id_, "result": result}


class RpcServer:
    def __init__(self, session: Session | None = None):
        self.session = session or Session()
        self.initialized = False
        self._lock = threading.Lock()

    # -- framing -------------------------------------------------------

    def handle_json(self, text: str) -> str | None:
        """One JSON-RPC message in, one out (None for notifications)."""
        try:
            envelope = json.loads(text)
        except json.JSONDecodeError as exc:
            return json.dumps(_error(None, PARSE_ERROR, f"parse error: {exc}"))
        response = self.handle_envelope(envelope)
        return None if response is None else json.dumps(response)

    # -- envelopes -----------------------------------------------------

    def handle_envelope(self, envelope) -> dict | None:
        with self._lock:
            return self._dispatch(envelope)

    def _dispatch(self, envelope) -> dict | None:
        if not isinstance(envelope, dict):
            return _error(None, INVALID_REQUEST,
                          "expected a single JSON-RPC request object")
        id_ = envelope.get("id")
        is_notification = "id" not in envelope
        method = envelope.get("method")
        params = envelope.get("params") or {}
        if not isinstance(method, str):
            if is_notification:
                return None
            return _error(id_, INVALID_REQUEST, "request has no method")

        if method == "initialize":
            response = self._initialize(id_, params)
        elif method == "notifications/initialized":
            return None  # state transition only
        elif method == "tools/list":
            response = self._tools_list(id_)
        elif method == "tools/call":
            response = self._tools_call(id_, params)
        else:
            logger.debug("unknown method %s", method)
            response = _error(id_, METHOD_NOT_FOUND, f"method not found: {method}")
        return None if is_notification else response

    def _initialize(self, id_, params) -> dict:
        if not isinstance(params, dict):
            return _error(id_, INVALID_PARAMS, "initialize params must be an object")
        if self.initialized:
            return _error(id_, INVALID_REQUEST, "server already initialized")
        self.initialized = True
        return _result(id_, {
            "protocolVersion": PROTOCOL_VERSION,
            "capabilities": {"tools": {}},
            "serverInfo": {"name": SERVER_NAME, "version": __version__},
        })

    def _require_initialized(self, id_) -> dict | None:
        if not self.initialized:
            return _error(id_, NOT_INITIALIZED, "server not initialized")
        return None

    def _tools_list(self, id_) -> dict:
        gate = self._require_initialized(id_)
        if gate is not None:
            return gate
        return _result(id_, {"tools": registry.descriptors()})

    def _tools_call(self, id_, params) -> dict:
        gate = self._require_initialized(id_)
        if gate is not None:
            return gate
        if not isinstance(params, dict) or not isinstance(params.get("name"), str):
            return _error(id_, INVALID_PARAMS, "tools/call needs a tool name")
        name = params["name"]
        if name not in registry.TOOLS_BY_NAME:
            return _error(id_, METHOD_NOT_FOUND, f"unknown tool: {name}")
        arguments = params.get("arguments", {})
        logger.info("tools/call %s", name)
        result = registry.call_tool(self.session, name, arguments)
        return _result(id_, result.to_payload())
