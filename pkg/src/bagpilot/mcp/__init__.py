"""MCP tool server: registry, JSON-RPC core, transports, client."""

from .client import McpClient, McpRpcError
from .content import ToolResult, extract_json_block, fail, ok, ok_with_image
from .http import create_app
from .registry import TOOL_NAMES, TOOLS, TOOLS_BY_NAME, call_tool, descriptors
from .server import PROTOCOL_VERSION, SERVER_NAME, RpcServer
from .stdio import serve_stdio

__all__ = [
    "McpClient",
    "McpRpcError",
    "PROTOCOL_VERSION",
    "RpcServer",
    "SERVER_NAME",
    "TOOLS",
    "TOOLS_BY_NAME",
    "TOOL_NAMES",
    "ToolResult",
    "call_tool",
    "create_app",
    "descriptors",
    "extract_json_block",
    "fail",
    "ok",
    "ok_with_image",
    "serve_stdio",
]
