import pytest

# nodeid -> {"number", "title", "status", "notes"}
_criteria: dict[str, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture
def evidence(request):
    """Notes printed next to the criterion in the terminal summary."""
    notes: list[str] = []
    request.node.user_properties.append(("evidence", notes))
    return notes


def pytest_collection_finish(session):
    for item in session.items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            number, title = marker.args
            _criteria[item.nodeid] = {
                "number": number, "title": title, "status": "NOT RUN", "notes": [],
            }


def pytest_runtest_logreport(report):
    entry = _criteria.get(report.nodeid)
    if entry is None:
        return
    if report.when == "call":
        for key, value in report.user_properties:
            if key == "evidence":
                entry["notes"] = list(value)
    if report.failed:
        entry["status"] = "FAIL"
    elif report.skipped:
        entry["status"] = "SKIP"
        entry["notes"].append(str(report.longrepr[-1]).removeprefix("Skipped: "))
    elif report.when == "call" and entry["status"] != "FAIL":
        entry["status"] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for entry in sorted(_criteria.values(), key=lambda e: e["number"]):
        line = f"[{entry['status']}] criterion {entry['number']}: {entry['title']}"
        if entry["notes"]:
            line += " | " + "; ".join(entry["notes"])
        terminalreporter.write_line(line)
