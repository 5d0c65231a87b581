import os
from pathlib import Path

import pytest
from hypothesis import settings

from wikicite.lexicon import bundled_lexicon_path, load_lexicon

DATA = Path(__file__).parent / "data"
FIXTURE_DUMP = Path(__file__).resolve().parents[1] / "src" / "wikicite" / "data" / "fixture_dump.xml"

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=50, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fixture_dump():
    return FIXTURE_DUMP


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon(bundled_lexicon_path())


_acceptance = []


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    name = marker.args[0] if marker.args else item.name
    ok = call.excinfo is None
    _acceptance.append((name, ok, round(call.duration, 2)))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, seconds in _acceptance:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  ({seconds}s)")
