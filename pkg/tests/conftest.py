import pytest

from impulse_dose import CycleSpec, DesignRequest, HillNonlinearity, PlantParams, build_plant, synthesize

NOMINAL_ALPHA = 0.0374
NOMINAL_HILL = HillNonlinearity(c50=3.2425, gamma=2.6677)


@pytest.fixture(scope="session")
def plant():
    return build_plant(PlantParams(alpha=NOMINAL_ALPHA))


@pytest.fixture(scope="session")
def hill_nominal():
    return NOMINAL_HILL


@pytest.fixture(scope="session")
def paper_design():
    """lam=300, T=20 with F'=-0.15, Phi'=0.29 on the nominal patient."""
    return synthesize(DesignRequest(spec=CycleSpec(300.0, 20.0), f_slope=-0.15, phi_slope=0.29))


# ---- one pass/fail line per acceptance criterion in the terminal summary

_acceptance: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    marker = report.__dict__.get("acceptance")
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        prev = _acceptance.get(number, (title, "PASS"))[1]
        outcome = "PASS" if report.outcome == "passed" and prev == "PASS" else "FAIL"
        _acceptance[number] = (title, outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is not None:
        report.__dict__["acceptance"] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, outcome = _acceptance[number]
        terminalreporter.write_line(f"[{outcome}] {number:2d}. {title}")
