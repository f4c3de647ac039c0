"""bench command line.

    bench fixtures --out ./bench_work/fixtures
    bench run --suite default --agent scripted:perfect --out ./bench_work
    bench run --suite my_suite.json --agent http:config.json --server http://host:8711

Without --server an embedded HTTP server is started against the
fixture directory for the duration of the run.
"""

import argparse
import sys
from pathlib import Path

from ..errors import BagpilotError
from ..mcp.client import McpClient
from ..mcp.embedded import EmbeddedServer
from ..synth import CANNED, generate
from .agents import SCRIPTED_AGENTS, HttpChatAgent
from .report import export_report, render_summary
from .runner import run_suite
from .tasks import load_tasks

BENCH_FIXTURES = ("mixed", "straight_line", "circle", "pillar")


def ensure_fixtures(bags_dir: Path, names=BENCH_FIXTURES) -> None:
    bags_dir.mkdir(parents=True, exist_ok=True)
    for name in names:
        out = bags_dir / f"{name}.bag"
        if not out.exists():
            generate(name, out)


def _make_agent(spec: str):
    kind, _, rest = spec.partition(":")
    if kind == "scripted":
        try:
            return SCRIPTED_AGENTS[rest or "perfect"]()
        except KeyError:
            raise BagpilotError(
                f"unknown scripted agent {rest!r}; "
                f"valid: {', '.join(SCRIPTED_AGENTS)}"
            ) from None
    if kind == "http":
        if not rest:
            raise BagpilotError("http agent needs a config file: --agent http:cfg.json")
        return HttpChatAgent.from_config(rest)
    raise BagpilotError(f"unknown agent kind {kind!r}; use scripted:<name> or http:<cfg>")


def cmd_fixtures(args) -> int:
    ensure_fixtures(Path(args.out))
    for name in BENCH_FIXTURES:
        print(f"{Path(args.out) / (name + '.bag')}")
    return 0


def cmd_run(args) -> int:
    out_dir = Path(args.out)
    bags_dir = Path(args.bags) if args.bags else out_dir / "fixtures"
    ensure_fixtures(bags_dir)
    tasks = load_tasks(args.suite, str(bags_dir))
    agent = _make_agent(args.agent)

    server = None
    try:
        if args.server:
            url = args.server
        else:
            server = EmbeddedServer(bags=str(bags_dir))
            url = server.start()
        with McpClient(base_url=url) as client:
            client.initialize()
            results = run_suite(tasks, agent, client)
    finally:
        if server is not None:
            server.stop()

    paths = export_report(results, out_dir)
    print(render_summary(results), end="")
    print(f"reports: {paths['calls']}, {paths['tasks']}, {paths['summary']}")
    full = sum(1 for r in results if r.success == "full")
    return 0 if full == len(results) else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Run the task suite against an agent through the MCP server.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fx = sub.add_parser("fixtures", help="generate the benchmark fixture bags")
    fx.add_argument("--out", required=True, help="fixture output directory")
    fx.set_defaults(func=cmd_fixtures)

    run = sub.add_parser("run", help="run a task suite")
    run.add_argument(
        "--suite", default="default",
        help="task suite JSON, or 'default' for the shipped 10-task suite",
    )
    run.add_argument(
        "--agent", required=True,
        help="scripted:<perfect|verbose|lazy> or http:<config.json>",
    )
    run.add_argument("--server", default=None, help="MCP server URL (default: embedded)")
    run.add_argument("--bags", default=None, help="fixture directory (default: <out>/fixtures)")
    run.add_argument("--out", default="bench_out", help="report output directory")
    run.set_defaults(func=cmd_run)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BagpilotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
