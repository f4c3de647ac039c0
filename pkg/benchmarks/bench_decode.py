#!/usr/bin/env python3
"""Decode throughput: compiled executor vs pure-Python fallback.

Generates the mixed fixture, decodes every message payload through
both plan executors, and reports messages/second.

    python benchmarks/bench_decode.py [--repeats 5]
"""

import argparse
import tempfile
import time
from pathlib import Path

from bagpilot import codec
from bagpilot.bagio import open_bag
from bagpilot.codec import _pydecode
from bagpilot.codec.plan import compile_plan
from bagpilot.synth import generate

try:
    from bagpilot.codec import _fastdecode
except ImportError:
    _fastdecode = None


def load_workload(bag_path: Path):
    handle = open_bag(bag_path)
    work = []
    plans = {}
    for conn, msg in handle.stream():
        if conn.conn_id not in plans:
            schemas = codec.parse_definition(conn.message_definition, conn.type_name)
            plans[conn.conn_id] = compile_plan(schemas)
        work.append((plans[conn.conn_id], msg.payload))
    return work


def run(executor, work, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        warnings: list = []
        t0 = time.perf_counter()
        for plan, payload in work:
            executor.execute(plan, payload, 0, warnings)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--bag", default=None, help="existing bag to decode")
    args = parser.parse_args()

    if args.bag:
        bag_path = Path(args.bag)
    else:
        tmp = Path(tempfile.mkdtemp(prefix="bagpilot-bench-"))
        bag_path = tmp / "mixed.bag"
        generate("mixed", bag_path)
    work = load_workload(bag_path)
    print(f"workload: {len(work)} messages from {bag_path}")

    py_s = run(_pydecode, work, args.repeats)
    print(f"pure python : {len(work) / py_s:10.0f} msg/s  ({py_s * 1e3:.1f} ms)")
    if _fastdecode is None:
        print("compiled    : not built (pip install -e . rebuilds it)")
        return
    c_s = run(_fastdecode, work, args.repeats)
    print(f"compiled    : {len(work) / c_s:10.0f} msg/s  ({c_s * 1e3:.1f} ms)")
    print(f"speedup     : {py_s / c_s:.2f}x")


if __name__ == "__main__":
    main()
