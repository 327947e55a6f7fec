import pytest

_CRITERIA = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "notes": []})
    if report.failed or (report.when == "setup" and report.skipped):
        entry["ok"] = False
    if report.when == "call":
        entry["notes"].extend(getattr(item, "criterion_notes", []))


@pytest.fixture
def measured(request):
    """Attach a measured value to the acceptance line printed at the end of the run."""
    notes = []
    request.node.criterion_notes = notes
    return notes.append


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] else "FAIL"
        notes = "; ".join(entry["notes"])
        line = f"[{status}] criterion {number:2d}: {entry['title']}"
        terminalreporter.write_line(f"{line} ({notes})" if notes else line)
