import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from conftest import (B1, B2, EXT, LENS_J, LENS_P, LENS_Q, LENS_R, UNIT, circle_center,
                      hollow_network, lens_network)
from dbubble.errors import DomainError, StructuralError
from dbubble.instance import ProblemInstance
from dbubble.profile import (GeneratingNetwork, MeridianEdge, WeightClass, WeightTriple,
                             arc_to_axis, classify_weights, junction_residual, semicircle,
                             volume, weighted_area)
from dbubble.spherical import unit_ball_volume
from dbubble.standard import construct
from dbubble.topology import validate


@pytest.mark.parametrize("w, expected", [
    ((1, 1, 1), WeightClass.STRICT),
    ((2.5, 1, 1), WeightClass.INTERFACE_DOMINANT),
    ((0.5, 2, 1), WeightClass.NESTED_1),
    ((0.5, 1, 2), WeightClass.NESTED_2),
    ((2, 1, 1), WeightClass.BOUNDARY),
    ((1, 2, 1), WeightClass.BOUNDARY),
    ((0, 1, 1), WeightClass.BOUNDARY),
    ((0.8, 1, 1), WeightClass.STRICT),
])
def test_classify_weights(w, expected):
    assert classify_weights(WeightTriple(*w)) is expected


@pytest.mark.parametrize("w", [(0, 0, 0), (-1, 1, 1), (math.nan, 1, 1)])
def test_bad_weights(w):
    with pytest.raises(DomainError):
        WeightTriple(*w)


@given(st.tuples(*[st.floats(0.01, 10)] * 3))
def test_classification_is_total_and_scale_free(w):
    wt = WeightTriple(*w)
    assert classify_weights(wt) is classify_weights(wt.scaled(3.7))


def test_half_disk_volume_and_area():
    net = GeneratingNetwork(3, [semicircle(0.0, 1.0, B1, EXT)], UNIT)
    assert volume(net, B1) == pytest.approx(4 * math.pi / 3, rel=1e-14)
    assert volume(net, B2) == 0.0
    assert weighted_area(net)["A_ext1"] == pytest.approx(4 * math.pi, rel=1e-14)
    half = weighted_area(net, WeightTriple(1, 0.5, 1))
    assert half["Q"] == pytest.approx(2 * math.pi, rel=1e-14)


def test_half_disk_radius_two_in_r4():
    net = GeneratingNetwork(4, [semicircle(0.0, 2.0, B1, EXT)], UNIT)
    assert volume(net, B1) == pytest.approx(8 * math.pi ** 2, rel=1e-14)


def test_exterior_volume_is_unbounded():
    net = GeneratingNetwork(3, [semicircle(0.0, 1.0, B1, EXT)], UNIT)
    with pytest.raises(DomainError):
        volume(net, EXT)


def _lens_oracle(n):
    """Disk-method volume and area of the lens, by scipy quadrature."""
    c1 = circle_center(LENS_P, LENS_J, LENS_R[0], (0, -5))
    c2 = circle_center(LENS_J, LENS_Q, LENS_R[1], (0, -5))

    def upper(x):
        c, r = (c1, LENS_R[0]) if x <= 0 else (c2, LENS_R[1])
        return c[1] + math.sqrt(max(r * r - (x - c[0]) ** 2, 0.0))

    def slope(x):
        c, r = (c1, LENS_R[0]) if x <= 0 else (c2, LENS_R[1])
        return -(x - c[0]) / math.sqrt(r * r - (x - c[0]) ** 2)

    vol = unit_ball_volume(n - 1) * sum(
        quad(lambda x: upper(x) ** (n - 1), a, b, epsabs=1e-13)[0] for a, b in ((-1, 0), (0, 1)))
    area = (n - 1) * unit_ball_volume(n - 1) * sum(
        quad(lambda x: upper(x) ** (n - 2) * math.hypot(1, slope(x)), a, b,
             epsabs=1e-12, limit=200)[0] for a, b in ((-1, 0), (0, 1)))
    return vol, area


@pytest.mark.parametrize("n", [3, 4, 5])
def test_lens_against_disk_method(n):
    net = lens_network(n)
    assert validate(net) == []
    vol, area = _lens_oracle(n)
    assert volume(net, B1) == pytest.approx(vol, rel=1e-9)
    assert weighted_area(net)["A_ext1"] == pytest.approx(area, rel=1e-7)


def test_lens_monte_carlo():
    # 2-D Monte-Carlo of the revolution integral 2*pi * iint y dA (n = 3)
    rng = np.random.default_rng(5)
    pts = rng.uniform([-1.1, 0], [1.1, 1.2], size=(400_000, 2))
    c1 = circle_center(LENS_P, LENS_J, LENS_R[0], (0, -5))
    c2 = circle_center(LENS_J, LENS_Q, LENS_R[1], (0, -5))
    in1 = (pts[:, 0] <= 0) & (np.hypot(*(pts - c1).T) <= LENS_R[0]) & (pts[:, 0] >= -1)
    in2 = (pts[:, 0] > 0) & (np.hypot(*(pts - c2).T) <= LENS_R[1]) & (pts[:, 0] <= 1)
    vals = 2 * math.pi * pts[:, 1] * (in1 | in2) * (2.2 * 1.2)
    est, sigma = vals.mean(), vals.std() / math.sqrt(len(vals))
    assert abs(est - volume(lens_network(3), B1)) < 4 * sigma


def test_standard_pieces_match_closed_form(unit_equal):
    net = construct(unit_equal).network()
    a = weighted_area(net)
    # congruent caps meeting a flat disk at 120 degrees
    r = 0.656496681228464360785982251272
    assert a["A_ext1"] == pytest.approx(3 * math.pi * r * r, rel=1e-12)
    assert a["A_int"] == pytest.approx(math.pi * 0.75 * r * r, rel=1e-12)
    assert a["Q"] == pytest.approx(9.13942167806933340515447401342, rel=1e-12)


def _star(rotate=0.0):
    j = (0.0, 1.0)
    out = []
    for ang, (l, r) in zip((math.pi / 2, 7 * math.pi / 6, 11 * math.pi / 6),
                           ((B1, B2), (B1, EXT), (EXT, B2))):
        if l is B1 and r is EXT:
            ang += rotate
        q = (j[0] + 0.5 * math.cos(ang), j[1] + 0.5 * math.sin(ang))
        out.append(MeridianEdge(j, q, 0.0, l, r))
    return GeneratingNetwork(3, out, UNIT)


def test_junction_residual_equilateral():
    assert junction_residual(_star()) == [pytest.approx(0.0, abs=1e-15)]


def test_junction_residual_rotated():
    assert junction_residual(_star(0.1)) == [pytest.approx(2 * math.sin(0.05), rel=1e-12)]
    assert 2 * math.sin(0.05) == pytest.approx(0.0999583385413566631, rel=1e-15)


def test_junction_residual_standard(unequal):
    net = construct(unequal).network()
    assert max(junction_residual(net)) < 1e-10


def test_four_edge_junction_is_structural():
    net = _star()
    extra = MeridianEdge((0.0, 1.0), (0.3, 1.4), 0.0, B1, EXT)
    bad = GeneratingNetwork(3, list(net.edges) + [extra], UNIT)
    with pytest.raises(StructuralError):
        junction_residual(bad)
    assert "FOUR_JUNCTION" in {v.code for v in validate(bad)}


@given(st.floats(-3, 3), st.floats(-math.pi, math.pi))
@settings(max_examples=40)
def test_junction_residual_rigid_invariance(dx, turn):
    base = junction_residual(_star(turn * 0.2))[0]
    moved = GeneratingNetwork(3, [e.translated(dx) for e in _star(turn * 0.2).edges], UNIT)
    assert junction_residual(moved)[0] == pytest.approx(base, abs=1e-14)
    mirrored = _star(turn * 0.2).axis_mirrored()
    assert junction_residual(mirrored)[0] == pytest.approx(base, abs=1e-14)
    swapped = _star(turn * 0.2).swapped_labels()
    assert junction_residual(swapped)[0] == pytest.approx(base, abs=1e-14)


def test_validate_standard(unit_equal, unequal):
    for alpha in (unit_equal, unequal, ProblemInstance.of(4, 2, 1, 0.8, 1, 0.9)):
        assert validate(construct(alpha).network()) == []


def test_validate_hollow():
    assert [v.code for v in validate(hollow_network())] == ["EXT_DISCONNECTED"]


@pytest.mark.parametrize("edges, code", [
    ([MeridianEdge((-1, 0), (1, 0), 1.0, B1, EXT)], "BELOW_AXIS"),
    ([MeridianEdge((-1, 0), (1, 0), 0.0, B1, EXT)], "ON_AXIS"),
    ([MeridianEdge((-1, 0), (0, 1), -1.0, B1, B1)], "SAME_LABEL"),
    ([MeridianEdge((-1, 0), (0, 1), -1.0, EXT, B1)], "DANGLING"),
    ([MeridianEdge((-1, 0), (1, 0), -2.0, EXT, B1)], "ARC_INCONSISTENT"),
])
def test_validate_codes(edges, code):
    net = GeneratingNetwork(3, edges, UNIT)
    assert code in {v.code for v in validate(net)}


def test_validate_empty():
    assert [v.code for v in validate(GeneratingNetwork(3, [], UNIT))] == ["EMPTY"]


def test_wrong_label_side():
    # bubble label on the outside of the sphere
    net = GeneratingNetwork(3, [semicircle(0.0, 1.0, EXT, B1)], UNIT)
    assert "UNBOUNDED_NOT_EXT" in {v.code for v in validate(net)}


def test_arc_to_axis_meets_axis_perpendicularly():
    for delta in (-2.0, -0.5, 0.0, 0.7, 2.5):
        e = arc_to_axis(0.0, 1.0, delta, EXT, B1)
        assert e.q[1] == pytest.approx(0.0, abs=1e-15)
        x, y = e.point(e.length)
        assert (x, y) == pytest.approx(e.q, abs=1e-14)
        assert math.cos(e.end_angle) == pytest.approx(0.0, abs=1e-14)


def test_json_round_trip(tmp_path, unequal):
    net = construct(unequal).network()
    path = tmp_path / "net.json"
    net.save(path)
    back = GeneratingNetwork.load(path)
    assert back.volumes() == pytest.approx(net.volumes(), rel=1e-14)
    assert weighted_area(back)["Q"] == pytest.approx(weighted_area(net)["Q"], rel=1e-14)
    doc = json.loads(path.read_text())
    assert set(doc) == {"dimension", "weights", "edges"}
    assert set(doc["edges"][0]) >= {"kind", "p", "q", "curvature", "left", "right"}


@pytest.mark.parametrize("text", ["{", "[]", '{"dimension": 3}',
                                  '{"dimension": 3, "edges": [{"kind": "BLOB"}]}'])
def test_malformed_json(tmp_path, text):
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(DomainError):
        GeneratingNetwork.load(path)


@settings(max_examples=30, deadline=None)
@given(lam=st.floats(0.2, 5.0), n=st.integers(3, 6))
def test_scaling(lam, n):
    net = lens_network(n)
    big = net.scaled(lam)
    assert volume(big, B1) == pytest.approx(lam ** n * volume(net, B1), rel=1e-9)
    assert weighted_area(big)["Q"] == pytest.approx(lam ** (n - 1) * weighted_area(net)["Q"],
                                                    rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(which=st.integers(0, 4), n=st.integers(3, 5))
def test_reversal_invariance(which, n):
    net = construct(ProblemInstance.of(n, 1.0, 0.6, 0.9, 1.0, 0.8)).network()
    which %= len(net.edges)
    edges = list(net.edges)
    edges[which] = edges[which].reversed()
    flipped = GeneratingNetwork(n, edges, net.weights)
    assert flipped.volumes() == pytest.approx(net.volumes(), rel=1e-12)
    assert weighted_area(flipped)["Q"] == pytest.approx(weighted_area(net)["Q"], rel=1e-12)
    assert validate(flipped) == []
