import pytest
from hypothesis import settings

# numerical property tests: wall-clock deadlines only add flakiness
settings.register_profile("numerics", deadline=None)
settings.load_profile("numerics")

_CRITERIA = {}


def pytest_runtest_logreport(report):
    mark = _MARKS.get(report.nodeid)
    if mark is None:
        return
    number, title = mark
    entry = _CRITERIA.setdefault(number, {"title": title, "passed": True, "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed:
        entry["passed"] = False


_MARKS = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _MARKS[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "FAIL" if not e["passed"] else ("PASS" if e["ran"] else "SKIP")
        terminalreporter.write_line(f"criterion {number:2d} {status}  {e['title']}")


@pytest.fixture(scope="session")
def schwarzschild3():
    from staticlevels.schwarzschild import SchwarzschildModel

    return SchwarzschildModel.create(3, 1.0)


@pytest.fixture(scope="session")
def two_center():
    from staticlevels.harmonicfields import MultiCenterField

    return MultiCenterField([[-0.5, 0.0, 0.0], [0.5, 0.0, 0.0]], [0.5, 0.5], name="two-center")
