"""Acceptance bookkeeping: one PASS/FAIL line per criterion after the run."""

from collections import defaultdict

import pytest

_RESULTS = defaultdict(list)  # criterion -> [(test name, passed, notes)]
_NOTES = defaultdict(list)  # nodeid -> notes
_TITLES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion checked by this test")


@pytest.fixture
def note(request):
    """Attach a measured value to the acceptance line of the current test."""
    return lambda text: _NOTES[request.node.nodeid].append(text)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    num, title = mark.args
    _TITLES[num] = title
    _RESULTS[num].append((item.name, rep.passed, _NOTES.pop(item.nodeid, [])))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        checks = _RESULTS[num]
        ok = all(p for _, p, _ in checks)
        tr.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {_TITLES[num]}")
        for name, passed, notes in checks:
            detail = "; ".join(notes)
            tr.write_line(f"    {'ok  ' if passed else 'FAIL'} {name}{': ' + detail if detail else ''}")
