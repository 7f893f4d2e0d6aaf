import pathlib

import pytest

from kregular.polysys import parse

DATA = pathlib.Path(__file__).parent / "data"

# criterion number -> (passed, description); filled by test_acceptance
RESULTS: dict = {}


def load(name: str):
    return parse((DATA / name).read_text(), analysis=True)


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, desc = RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {desc}")
