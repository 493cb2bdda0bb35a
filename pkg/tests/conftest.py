"""Per-criterion PASS/FAIL summary for the acceptance suite."""
import pytest

_outcomes = {}
_notes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def note(request):
    """Append a measurement line shown next to the criterion verdict."""
    marker = request.node.get_closest_marker("criterion")
    key = marker.args[0] if marker else request.node.nodeid
    lines = _notes.setdefault(key, [])
    return lines.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call" and not rep.failed:
        return
    number, title = marker.args
    prev = _outcomes.get(number, (title, "PASS"))[1]
    verdict = "FAIL" if rep.failed or prev == "FAIL" else "PASS"
    _outcomes[number] = (title, verdict)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_outcomes):
        title, verdict = _outcomes[number]
        tr.write_line(f"{verdict} criterion {number}: {title}")
        for line in _notes.get(number, []):
            tr.write_line(f"    {line}")
