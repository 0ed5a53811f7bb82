import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dbubble.errors import DomainError
from dbubble.instance import ProblemInstance
from dbubble.profile import Label, WeightTriple, weighted_area
from dbubble.spherical import ball_radius, sphere_area
from dbubble.standard import (DegenerateKind, construct, construct_degenerate, degenerate_kind,
                              junction_angles, measured, ratio_profile, sensitivity,
                              wedge_angles)
from dbubble.topology import validate

# equal-volume unit-weight bubble in R^3, closed form (mpmath, 30 digits)
R_EQ = 0.656496681228464360785982251272
RHO_EQ = 0.568542803444024751348549602719
Q_EQ = 9.13942167806933340515447401342

strict_weights = st.tuples(st.floats(0.3, 1.0), st.floats(0.3, 1.0), st.floats(0.3, 1.0)).filter(
    lambda w: w[0] < w[1] + w[2] - 0.05 and w[1] < w[0] + w[2] - 0.05 and w[2] < w[0] + w[1] - 0.05)


def _pair_cos(a, b):
    return math.cos(a) * math.cos(b) + math.sin(a) * math.sin(b)


def test_unit_angles_are_120():
    phi = junction_angles(WeightTriple(1, 1, 1))
    for i in range(3):
        for j in range(i + 1, 3):
            assert _pair_cos(phi[i], phi[j]) == pytest.approx(-0.5, abs=1e-15)
    assert wedge_angles(WeightTriple(1, 1, 1))[2] == pytest.approx(2 * math.pi / 3, abs=1e-15)


def test_law_of_cosines_angle():
    phi = junction_angles(WeightTriple(0.5, 1, 1))
    assert _pair_cos(phi[1], phi[2]) == pytest.approx(-0.875, abs=1e-14)


@given(strict_weights)
def test_junction_angles_balance(w):
    wt = WeightTriple(*w)
    phi = junction_angles(wt)
    v = sum(wi * np.array([math.cos(p), math.sin(p)]) for wi, p in zip(w, phi))
    assert np.hypot(*v) < 1e-12
    for (i, j, k) in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        expected = (w[k] ** 2 - w[i] ** 2 - w[j] ** 2) / (2 * w[i] * w[j])
        assert _pair_cos(phi[i], phi[j]) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("w", [(2, 1, 1), (3, 1, 1), (0.2, 2, 1)])
def test_junction_angles_reject_nonstrict(w):
    with pytest.raises(DomainError):
        junction_angles(WeightTriple(*w))


def test_equal_volume_unit_bubble(unit_equal):
    g = construct(unit_equal)
    k0, k1, k2 = g.signed_curvatures
    assert k0 == 0.0
    assert k1 == pytest.approx(-k2, rel=1e-14)
    assert g.cap_radii[1] == pytest.approx(R_EQ, rel=1e-12)
    assert g.rho == pytest.approx(R_EQ * math.sqrt(3) / 2, rel=1e-12)
    assert g.rho == pytest.approx(RHO_EQ, rel=1e-12)
    m = measured(g)
    assert m["Q"] == pytest.approx(Q_EQ, rel=1e-12)
    assert m["H_int"] == 0.0


def test_unequal_curvature_identity(unequal):
    g = construct(unequal)
    r0, r1, r2 = g.cap_radii
    assert r1 < r2
    assert 1 / r0 == pytest.approx(1 / r1 - 1 / r2, rel=1e-9)
    assert g.curvature_residual() < 1e-10
    m = measured(g)
    assert m["H_int"] == pytest.approx(m["H_ext1"] - m["H_ext2"], rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(strict_weights, st.floats(0.05, 1.0), st.integers(3, 6))
def test_construct_invariants(w, ratio, n):
    alpha = ProblemInstance.of(n, 1.0, ratio, *w)
    g = construct(alpha)
    assert g.conormal_residual() < 1e-12
    assert g.curvature_residual() < 1e-10
    net = g.network()
    assert net.volumes() == pytest.approx(alpha.volumes, rel=1e-9)
    assert validate(net) == []
    # closed-form piece areas against edge quadrature
    m, a = measured(g), weighted_area(net)
    for key in ("A_ext1", "A_ext2", "A_int", "Q"):
        assert m[key] == pytest.approx(a[key], rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(strict_weights, st.floats(0.05, 1.0), st.integers(3, 5))
def test_swap_symmetry(w, ratio, n):
    alpha = ProblemInstance.of(n, 1.0, ratio, *w)
    a, b = construct(alpha), construct(alpha.swapped())
    ka, kb = a.signed_curvatures, b.signed_curvatures
    assert kb[0] == pytest.approx(-ka[0], abs=1e-9)
    assert kb[1] == pytest.approx(-ka[2], rel=1e-9)
    assert kb[2] == pytest.approx(-ka[1], rel=1e-9)
    assert b.rho == pytest.approx(a.rho, rel=1e-9)
    mirrored = a.network().axis_mirrored().swapped_labels()
    assert mirrored.volumes() == pytest.approx(b.network().volumes(), rel=1e-9)


@pytest.mark.parametrize("w", [(1, 1, 1), (0.5, 1, 0.8), (0.9, 0.6, 1.0), (0.2, 1, 0.9)])
@pytest.mark.parametrize("n", [3, 5])
def test_ratio_monotone(w, n):
    _, r = ratio_profile(n, WeightTriple(*w), num=301)
    assert np.all(np.diff(r) < 0)


def test_disjoint_example():
    alpha = ProblemInstance.of(3, 1, 1, 3, 1, 1)
    g = construct(alpha)
    r = (3 / (4 * math.pi)) ** (1 / 3)
    assert g.kind is DegenerateKind.DISJOINT
    assert g.radii == pytest.approx((r, r), rel=1e-14)
    assert measured(g)["Q"] == pytest.approx(2 * 4 * math.pi * r * r, rel=1e-14)
    assert validate(g.network()) == []


def test_single_example():
    g = construct(ProblemInstance.of(3, 1, 0, 1, 1, 1))
    assert g.kind is DegenerateKind.SINGLE
    assert g.network().volumes() == pytest.approx((1.0, 0.0), abs=1e-14)


def test_nested_example():
    g = construct(ProblemInstance.of(3, 1, 1, 0.2, 2, 1))
    assert g.kind is DegenerateKind.NESTED
    assert g.inner is Label.B1
    assert g.radii == pytest.approx(((3 / (4 * math.pi)) ** (1 / 3),
                                     (6 / (4 * math.pi)) ** (1 / 3)), rel=1e-14)
    net = g.network()
    assert validate(net) == []
    assert net.volumes() == pytest.approx((1.0, 1.0), rel=1e-12)


def test_nested_unequal_volumes():
    # bubble 1 has the dominant exterior weight, so it sits inside
    alpha = ProblemInstance.of(3, 3, 1, 0.5, 1, 3)
    g = construct(alpha)
    assert g.inner is Label.B2
    assert g.radii == pytest.approx((ball_radius(3, 1), ball_radius(3, 4)), rel=1e-14)
    m = measured(g)
    assert m["Q"] == pytest.approx(0.5 * sphere_area(3, g.radii[0]) + sphere_area(3, g.radii[1]),
                                   rel=1e-14)
    assert g.network().volumes() == pytest.approx((3, 1), rel=1e-12)


def test_construct_degenerate_guards():
    with pytest.raises(DomainError):
        construct_degenerate(ProblemInstance.of(3, 1, 1, 1, 1, 1))
    with pytest.raises(DomainError):
        construct_degenerate(ProblemInstance.of(3, 1, 1, 3, 1, 1), DegenerateKind.NESTED)


@pytest.mark.parametrize("w, kind", [
    ((2, 1, 1), DegenerateKind.DISJOINT),
    ((0.5, 1.5, 1), DegenerateKind.NESTED),
])
def test_boundary_weights_use_closed_forms(w, kind):
    assert degenerate_kind(ProblemInstance.of(3, 1, 0.5, *w)) is kind


@pytest.mark.parametrize("v2", [0.3, 1.0])
def test_interface_limit_is_continuous(v2):
    disjoint = measured(construct(ProblemInstance.of(3, 1, v2, 2, 1, 1)))["Q"]
    gaps = []
    for eps in (1e-2, 1e-3, 1e-4):
        g = construct(ProblemInstance.of(3, 1, v2, 2 - eps, 1, 1))
        gaps.append(abs(measured(g)["Q"] - disjoint))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-2


def test_sensitivity_refinement(unit_equal):
    s = [sensitivity(unit_equal, h)["v1"] for h in (1e-3, 1e-4, 1e-5)]
    for key in ("kappa0", "R1", "R2", "center_distance"):
        vals = [d[key] for d in s]
        assert all(abs(v) < 10 for v in vals)
        assert vals[1] == pytest.approx(vals[0], abs=1e-5)
        assert vals[2] == pytest.approx(vals[1], abs=1e-5)


def test_sensitivity_swap_symmetry(unit_equal):
    s = sensitivity(unit_equal, 1e-4)
    for key in ("kappa0", "center_distance"):
        assert abs(s["w1"][key]) == pytest.approx(abs(s["w2"][key]), rel=1e-6)
    assert s["w1"]["R1"] == pytest.approx(s["w2"]["R2"], rel=1e-6)


def test_sensitivity_dilation_covariance():
    base = ProblemInstance.of(3, 1, 0.5, 0.8, 1, 0.9)
    lam = 1.7
    big = base.replace(v1=lam ** 3, v2=0.5 * lam ** 3)
    a, b = sensitivity(base, 1e-4), sensitivity(big, 1e-4)
    for key in ("R1", "R2", "center_distance"):
        assert b["w0"][key] == pytest.approx(lam * a["w0"][key], rel=1e-5)


def test_sensitivity_leaving_strict_region():
    with pytest.raises(DomainError):
        sensitivity(ProblemInstance.of(3, 1, 1, 2 - 1e-5, 1, 1), 1e-4)
