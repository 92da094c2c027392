import numpy as np
import pytest

from linssp.instances import HardInstanceParams, build_hard_instance, random_tabular

ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def hard():
    return build_hard_instance(HardInstanceParams.default(5, 3.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_tabular():
    return random_tabular(np.random.default_rng(7), n_states=3, n_actions=2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k)):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
