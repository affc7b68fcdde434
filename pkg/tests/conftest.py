from collections import defaultdict

CRITERIA = {
    1: "exact identities",
    2: "chain iteration equals closed form",
    3: "age law at p=0.7, t=50",
    4: "single-site law at t=20",
    5: "two-site joint law at t=20",
    6: "coupling merges at the first catastrophe",
    7: "stationary law of u^G",
    8: "generating-function stationarity",
    9: "indicator covariance Monte Carlo",
    10: "(max,min) long run vs limit series",
    11: "figure data",
}

_outcomes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.when == "call" or report.failed:
        _outcomes[number].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number, title in CRITERIA.items():
        results = _outcomes.get(number)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status:7s} {title}")
