import numpy as np
import pytest

from smbundle.bundles import standard_forms
from smbundle.connections import physical_constants, vacuum_connections
from smbundle.manifold import build_chart

CHARTS = ("minkowski-coordinate", "curved-demo", "rotating-frame")
VACUA = ("trivial-flat", "imaginary-constant")


@pytest.fixture(scope="session")
def forms():
    return standard_forms()


@pytest.fixture(scope="session")
def natural():
    return physical_constants("natural")


@pytest.fixture(scope="session")
def charts():
    return {name: build_chart(name) for name in CHARTS}


@pytest.fixture(scope="session")
def flat(charts):
    return charts["minkowski-coordinate"]


@pytest.fixture(scope="session")
def vacua(charts):
    return {(c, v): vacuum_connections(charts[c], v) for c in CHARTS for v in VACUA}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def grid_tol(chart):
    return 10 * chart.h**2


# criterion number -> (passed, detail), filled by the acceptance tests
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
