"""stdio transport: newline-delimited JSON-RPC, one message per line.

Responses keep request order; malformed lines produce a -32700 error
envelope and the loop keeps serving.
"""

import sys
from typing import IO

from .server import RpcServer


def serve_stdio(rpc: RpcServer, stdin: IO[str] | None = None,
                stdout: IO[str] | None = None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        reply = rpc.handle_json(line)
        if reply is not None:
            stdout.write(reply)
            stdout.write("\n")
            stdout.flush()
