import math

import numpy as np
import pytest

from halfdisk.planner import CylinderPoint
from halfdisk.vertical import casimir_E

# lines collected by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def random_covector(rng, h3_max=3.0, psi_margin=0.3):
    """Uniform draw on the unrolled H = 1 surface."""
    psi = rng.uniform(-math.pi - psi_margin, math.pi + psi_margin)
    return CylinderPoint(psi, rng.uniform(-h3_max, h3_max)).covector()


def random_generic_covector(rng, gap=0.01, **kw):
    """Random covector whose Casimir stays ``gap`` away from the separatrix."""
    while True:
        h = random_covector(rng, **kw)
        if abs(casimir_E(h) - 1.0) > gap:
            return h


def random_arc_covector(rng, h3_max=3.0):
    """Random covector strictly inside the h1 > 0 half-cylinder."""
    psi = rng.uniform(-math.pi / 2 + 0.05, math.pi / 2 - 0.05)
    return CylinderPoint(psi, rng.uniform(-h3_max, h3_max)).covector()


def wrap(a):
    return (np.asarray(a) + np.pi) % (2 * np.pi) - np.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
