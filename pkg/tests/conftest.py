import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from submig.forward import make_directions
from submig.geometry import ThinInclusion, sigma1, sigma2

_RESULTS = []

WAVELENGTH = 0.4
OMEGA = 2 * math.pi / WAVELENGTH


@pytest.fixture
def criterion():
    """Record one acceptance line; call with (label, passed, detail)."""
    def record(label, passed, detail=""):
        _RESULTS.append((label, bool(passed), detail))
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")


@pytest.fixture(scope="session")
def dirs64():
    return make_directions(64)


@pytest.fixture(scope="session")
def inc1():
    return ThinInclusion(sigma1(), 0.015, 5.0, 5.0, "sigma1")


@pytest.fixture(scope="session")
def inc2():
    return ThinInclusion(sigma2(), 0.015, 5.0, 5.0, "sigma2")


def curve_tree(curve, n=4001):
    return cKDTree(curve.position(np.linspace(*curve.parameter_range, n)))
