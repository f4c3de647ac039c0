import os
from pathlib import Path

import pytest

from bagpilot.store import Session
from bagpilot.synth import CANNED, generate


FIXTURE_NAMES = ("straight_line", "circle", "pillar", "mixed", "two_topic")


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory) -> Path:
    """All canned fixture bags, generated once, with pinned mtimes so
    listings and golden transcripts are stable."""
    root = tmp_path_factory.mktemp("bags")
    base_mtime = 1_700_000_000
    for i, name in enumerate(FIXTURE_NAMES):
        path = root / f"{name}.bag"
        generate(name, path)
        os.utime(path, (base_mtime + i, base_mtime + i))
        os.utime(path.with_suffix(".truth.json"), (base_mtime + i, base_mtime + i))
    return root


@pytest.fixture(scope="session")
def mixed_bag(fixture_dir: Path) -> Path:
    return fixture_dir / "mixed.bag"


@pytest.fixture(scope="session")
def straight_bag(fixture_dir: Path) -> Path:
    return fixture_dir / "straight_line.bag"


@pytest.fixture(scope="session")
def circle_bag(fixture_dir: Path) -> Path:
    return fixture_dir / "circle.bag"


@pytest.fixture(scope="session")
def pillar_bag(fixture_dir: Path) -> Path:
    return fixture_dir / "pillar.bag"


@pytest.fixture(scope="session")
def two_topic_bag(fixture_dir: Path) -> Path:
    return fixture_dir / "two_topic.bag"


@pytest.fixture
def session(mixed_bag: Path) -> Session:
    s = Session()
    s.set_bag_path(str(mixed_bag))
    return s
