from __future__ import annotations

import os
import random
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from treegroups import zoo  # noqa: E402
from treegroups.basilica import bp_generators  # noqa: E402

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def odometer2():
    return zoo.odometer(2)


@pytest.fixture(scope="session")
def basilica():
    """The original Basilica group, generated by a_0_0 = sigma (a_0_1, id) and a_0_1 = (a_0_0, id)."""
    return zoo.generalised_basilica(1, 2, 2)


@pytest.fixture(scope="session")
def grigorchuk():
    return zoo.grigorchuk()


@pytest.fixture(scope="session")
def gupta_sidki():
    return zoo.gupta_sidki(3)


@pytest.fixture(scope="session")
def bp2_odometer(odometer2):
    return bp_generators(odometer2, 2)


@pytest.fixture
def rng():
    return random.Random(20240617)
