"""HTTP transport: POST /rpc with one JSON-RPC envelope per request,
GET /healthz for liveness. Same handler as stdio, so the two
transports answer identically."""

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .server import RpcServer


def create_app(rpc: RpcServer, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="rosbags-mcp-lite", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/rpc")
    async def rpc_endpoint(request: Request) -> Response:
        body = await request.body()
        reply = rpc.handle_json(body.decode("utf-8", errors="replace"))
        if reply is None:
            return Response(status_code=204)
        return Response(content=reply, media_type="application/json")

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
