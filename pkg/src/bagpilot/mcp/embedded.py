"""Run the HTTP transport in a background thread (benchmarks, tests)."""

import threading
import time

import httpx
import uvicorn

from ..errors import AgentTransport
from ..store import Session
from .http import create_app
from .server import RpcServer


class EmbeddedServer:
    """uvicorn on an ephemeral localhost port, owned by this process."""

    def __init__(self, bags: str | None = None, session: Session | None = None):
        self.rpc = RpcServer(session or Session(bags))
        config = uvicorn.Config(
            create_app(self.rpc), host="127.0.0.1", port=0, log_level="warning"
        )
        self._server = uvicorn.Server(config)
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self.url: str | None = None

    def start(self, timeout: float = 10.0) -> str:
        self._thread.start()
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if self._server.started and self._server.servers:
                sockets = self._server.servers[0].sockets
                if sockets:
                    port = sockets[0].getsockname()[1]
                    self.url = f"http://127.0.0.1:{port}"
                    if self._healthy():
                        return self.url
            time.sleep(0.02)
        raise AgentTransport("embedded MCP server did not start in time")

    def _healthy(self) -> bool:
        try:
            return httpx.get(f"{self.url}/healthz", timeout=2.0).text == "ok"
        except httpx.HTTPError:
            return False

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=5.0)

    def __enter__(self) -> "EmbeddedServer":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()
