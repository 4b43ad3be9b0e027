import sys
from pathlib import Path

import hypothesis
import pytest

sys.path.insert(0, str(Path(__file__).parent))

hypothesis.settings.register_profile("ci", deadline=None, derandomize=True)
hypothesis.settings.load_profile("ci")

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call" and not (call.when == "setup" and call.excinfo is not None):
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "parts": []})
    entry["parts"].append((item.name, call.excinfo is None))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        ok = all(passed for _, passed in entry["parts"])
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {entry['title']}")
        if len(entry["parts"]) > 1:
            for name, passed in entry["parts"]:
                tr.write_line(f"               {'pass' if passed else 'fail'}  {name}")
