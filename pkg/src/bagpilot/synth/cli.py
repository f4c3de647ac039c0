"""bag-synth command line: generate a fixture bag from a scenario file.

    bag-synth --scenario straight_line --out /tmp/straight.bag
    bag-synth --scenario my_scenario.json --out /tmp/run.bag
"""

import argparse
import sys
from pathlib import Path

from ..errors import BagpilotError
from .fixtures import CANNED, write_fixture, write_jsonl_fixture
from .scenario import Scenario
from .simulate import simulate


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bag-synth",
        description="Generate a deterministic synthetic bag (plus a "
                    ".truth.json sidecar) from a scenario.",
    )
    parser.add_argument(
        "--scenario", required=True,
        help="scenario JSON file, or a built-in name: " + ", ".join(sorted(CANNED)),
    )
    parser.add_argument("--out", required=True, help="output .bag (or .jsonl) path")
    args = parser.parse_args(argv)

    try:
        if args.scenario in CANNED:
            scenario = CANNED[args.scenario]()
        else:
            scenario = Scenario.from_file(args.scenario)
        trace = simulate(scenario)
        out = Path(args.out)
        if out.suffix == ".jsonl":
            count = write_jsonl_fixture(trace, out)
            print(f"wrote {count} messages to {out}")
        else:
            stats = write_fixture(trace, out)
            print(
                f"wrote {stats.message_count} messages in {stats.chunk_count} "
                f"chunks to {out} ({stats.file_size} bytes)"
            )
    except (BagpilotError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
