import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

from casimir import gold, niobium  # noqa: E402
from casimir.pfa import SetupGeometry  # noqa: E402

TC = 9.25


@pytest.fixture(scope="session")
def au():
    return gold()


@pytest.fixture(scope="session")
def nb():
    return niobium()


@pytest.fixture(scope="session")
def fig3_setup():
    """R = 150 um, a = 300 nm, w = 80 nm, RRR = 5, T = 0.8 Tc."""
    return SetupGeometry.nb_au()


#: criterion number -> (title, passed, detail), filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {title}: {detail}")
