import numpy as np
import pytest

from fractal_langevin import build_koch, build_staircase

ACCEPTANCE_LINES = []


def segment_map(p, q):
    """Similarity taking (0, 0) -> p and (1, 0) -> q, as a 2x3 matrix."""
    (px, py), (qx, qy) = p, q
    dx, dy = qx - px, qy - py
    return [[dx, -dy, px], [dy, dx, py]]


@pytest.fixture(scope="session")
def koch8():
    return build_koch(8)


@pytest.fixture(scope="session")
def koch_table8(koch8):
    return build_staircase(koch8, 0.0)


@pytest.fixture(scope="session")
def koch_table10():
    return build_staircase(build_koch(10), 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
