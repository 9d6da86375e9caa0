import numpy as np
import pytest

from masknoise.core import SeedSpec
from masknoise.synthgen import ShapeSpec, make_circle, make_dataset

_acceptance_outcomes: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.nodeid.rpartition("::")[0].endswith("test_acceptance.py"):
        _acceptance_outcomes.append((item.name, report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_outcomes:
        label = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{label}: {name}")


def random_mask(seed: int, height: int = 16, width: int = 16, density: float = 0.4) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.random((height, width)) < density


@pytest.fixture(scope="session")
def small_blob_dataset():
    return make_dataset(ShapeSpec("blob", 128, 30, count=20, irregularity=0.2, seed=SeedSpec(5)))


@pytest.fixture(scope="session")
def circle_512():
    return make_circle(512, 100)
