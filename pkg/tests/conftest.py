import math

import pytest

from dbubble.instance import ProblemInstance
from dbubble.profile import GeneratingNetwork, Label, MeridianEdge, WeightTriple, semicircle

B1, B2, EXT = Label.B1, Label.B2, Label.EXT
UNIT = WeightTriple(1.0, 1.0, 1.0)


def circle_center(p, q, r, toward):
    """Centre of the radius-r circle through p and q on the side of the
    chord that ``toward`` (a point) lies on."""
    mx, my = 0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])
    dx, dy = q[0] - p[0], q[1] - p[1]
    d = math.hypot(dx, dy)
    nx, ny = -dy / d, dx / d
    if (toward[0] - mx) * nx + (toward[1] - my) * ny < 0:
        nx, ny = -nx, -ny
    off = math.sqrt(r * r - 0.25 * d * d)
    return mx + off * nx, my + off * ny


# lens: bubble 1 under two clockwise arcs (-1,0) -> (0,1) -> (1,0)
LENS_P, LENS_J, LENS_Q = (-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)
LENS_R = (1.2, 2.0)


def lens_network(n=3):
    edges = [MeridianEdge(LENS_P, LENS_J, -1 / LENS_R[0], EXT, B1),
             MeridianEdge(LENS_J, LENS_Q, -1 / LENS_R[1], EXT, B1)]
    return GeneratingNetwork(n, edges, UNIT)


def hollow_network(n=3):
    """B1 | B2 shell around a bounded exterior pocket."""
    edges = [
        MeridianEdge((-3, 0), (0, 3), -1 / 3, EXT, B1),
        MeridianEdge((0, 3), (3, 0), -1 / 3, EXT, B2),
        MeridianEdge((0, 3), (0, 1), 0.0, B2, B1),
        MeridianEdge((-1, 0), (0, 1), -1.0, B1, EXT),
        MeridianEdge((0, 1), (1, 0), -1.0, B2, EXT),
    ]
    return GeneratingNetwork(n, edges, UNIT)


def disjoint_spheres(n, r1, r2, gap=0.0):
    """Two round spheres on the axis, touching when gap = 0."""
    return GeneratingNetwork(n, [semicircle(-r1 - 0.5 * gap, r1, B1, EXT),
                                 semicircle(r2 + 0.5 * gap, r2, B2, EXT)])


@pytest.fixture
def unit_equal():
    return ProblemInstance.of(3, 1, 1, 1, 1, 1)


@pytest.fixture
def unequal():
    return ProblemInstance.of(3, 1, 2, 1, 1, 1)


# PASS/FAIL lines from the acceptance suite, repeated after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
