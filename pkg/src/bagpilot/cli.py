"""bagpilot-server command line.

    bagpilot-server --transport stdio --bags /data/rosbags
    bagpilot-server --transport http --port 8711 --bags /data/rosbags

BAGPILOT_BAGS is the fallback for --bags.
"""

import argparse
import logging
import os
import sys

from .mcp.http import create_app
from .mcp.server import RpcServer
from .mcp.stdio import serve_stdio
from .store import Session


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bagpilot-server",
        description="Serve bag-analysis tools over the Model Context Protocol.",
    )
    parser.add_argument(
        "--transport", choices=("stdio", "http"), default="stdio",
        help="stdio: newline-delimited JSON-RPC on stdin/stdout; "
             "http: POST /rpc + GET /healthz",
    )
    parser.add_argument("--port", type=int, default=8711, help="HTTP port")
    parser.add_argument("--host", default="127.0.0.1", help="HTTP bind address")
    parser.add_argument(
        "--bags", default=os.environ.get("BAGPILOT_BAGS"),
        help="initial bag file or directory (env: BAGPILOT_BAGS)",
    )
    parser.add_argument(
        "--log-level", default="info",
        choices=("debug", "info", "warning", "error"),
    )
    parser.add_argument(
        "--ui", default=None, metavar="DIR",
        help="also serve this directory statically at / (http transport only)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    # stdout is the protocol channel in stdio mode; logs go to stderr
    logging.basicConfig(
        level=args.log_level.upper(),
        stream=sys.stderr,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    session = Session(args.bags)
    rpc = RpcServer(session)
    if args.transport == "stdio":
        serve_stdio(rpc)
        return 0
    import uvicorn

    app = create_app(rpc, static_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


if __name__ == "__main__":
    sys.exit(main())
