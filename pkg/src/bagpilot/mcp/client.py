"""Minimal MCP client over the HTTP transport.

Used by the benchmark harness and the integration tests; speaks only
initialize / notifications/initialized / tools/list / tools/call.
"""

import itertools

import httpx

from ..errors import AgentTransport


class McpRpcError(Exception):
    """JSON-RPC error response from the server."""

    def __init__(self, code: int, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message


class McpClient:
    def __init__(self, base_url: str | None = None,
                 client: httpx.Client | None = None, timeout: float = 120.0):
        if client is None:
            if base_url is None:
                raise ValueError("need base_url or an httpx client")
            client = httpx.Client(base_url=base_url, timeout=timeout)
        self._client = client
        self._ids = itertools.count(1)

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "McpClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post(self, envelope: dict) -> dict | None:
        try:
            response = self._client.post("/rpc", json=envelope)
        except httpx.HTTPError as exc:
            raise AgentTransport(f"MCP server unreachable: {exc}") from exc
        if response.status_code == 204:
            return None
        body = response.json()
        if "error" in body:
            err = body["error"]
            raise McpRpcError(err.get("code", 0), err.get("message", ""))
        return body["result"]

    def request(self, method: str, params: dict | None = None) -> dict | None:
        envelope: dict = {"jsonrpc": "2.0", "id": next(self._ids), "method": method}
        if params is not None:
            envelope["params"] = params
        return self._post(envelope)

    def notify(self, method: str, params: dict | None = None) -> None:
        envelope: dict = {"jsonrpc": "2.0", "method": method}
        if params is not None:
            envelope["params"] = params
        self._post(envelope)

    def initialize(self) -> dict:
        result = self.request("initialize", {
            "protocolVersion": "2024-11-05",
            "capabilities": {},
            "clientInfo": {"name": "bagpilot-client", "version": "0.1.0"},
        })
        self.notify("notifications/initialized")
        return result or {}

    def tools_list(self) -> list[dict]:
        result = self.request("tools/list") or {}
        return result.get("tools", [])

    def call_tool(self, name: str, arguments: dict) -> dict:
        result = self.request("tools/call", {"name": name, "arguments": arguments})
        return result or {}
