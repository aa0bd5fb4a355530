import sys
from collections import defaultdict
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_CRITERIA: dict[int, str] = {}
_NODES: dict[str, int] = {}
_OUTCOMES: dict[int, list[str]] = defaultdict(list)
_NOTES: dict[int, list[str]] = defaultdict(list)


def pytest_collection_modifyitems(config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            number, title = mark.args
            _CRITERIA[number] = title
            _NODES[item.nodeid] = number


def pytest_runtest_logreport(report):
    number = _NODES.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _OUTCOMES[number].append(report.outcome)


@pytest.fixture
def note(request):
    """Attach a line to the acceptance summary of the test's criterion."""
    mark = request.node.get_closest_marker("criterion")
    number = mark.args[0] if mark else 0

    def add(text: str) -> None:
        _NOTES[number].append(text)

    return add


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcomes = _OUTCOMES.get(number, [])
        if not outcomes:
            verdict = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            verdict = "PASS"
        elif any(o == "failed" for o in outcomes):
            verdict = "FAIL"
        else:
            verdict = "SKIPPED"
        tr.write_line(f"criterion {number:2d}: {verdict:7s} {_CRITERIA[number]}")
        for text in _NOTES.get(number, []):
            tr.write_line(f"               {text}")
