import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import disjoint_spheres, hollow_network
from dbubble.errors import ClassMismatch, DomainError, StructuralError
from dbubble.instance import ProblemInstance
from dbubble.profile import GeneratingNetwork
from dbubble.standard import construct, measured
from dbubble.unification import (SWEEP_COLUMNS, SweepGrid, check_class, first_variation_volume,
                                 first_variation_weight, normalize, pressures, relative_area,
                                 sweep, sweep_cell)

Q_EQ = 9.13942167806933340515447401342


def test_normalize_volumes():
    a, lam, c = normalize(ProblemInstance.of(3, 2, 1, 1, 1, 1))
    assert a.volumes == (1.0, 0.5)
    assert lam == pytest.approx(2 ** (-1 / 3), rel=1e-15)
    assert c == 1.0


def test_normalize_weights():
    a, lam, c = normalize(ProblemInstance.of(3, 1, 1, 2, 2, 2))
    assert a.weights.as_tuple() == (1.0, 1.0, 1.0)
    assert c == 0.5 and lam == 1.0


@settings(max_examples=15, deadline=None)
@given(v2=st.floats(0.2, 3.0), scale=st.floats(0.3, 4.0), wscale=st.floats(0.2, 5.0),
       n=st.integers(3, 5))
def test_mu_invariant_under_normalization(v2, scale, wscale, n):
    alpha = ProblemInstance.of(n, scale, scale * v2, 0.7 * wscale, wscale, 0.9 * wscale)
    comp = disjoint_spheres(n, *(construct(alpha.replace(v2=0)).radii[0],
                                 construct(alpha.replace(v1=0)).radii[0]))
    mu = relative_area(comp, alpha).mu
    norm, lam, _ = normalize(alpha)
    mu_norm = relative_area(comp.scaled(lam), norm).mu
    assert mu_norm == pytest.approx(mu, rel=1e-12)


def test_self_comparison(unequal):
    rep = relative_area(construct(unequal).network(), unequal)
    assert rep.mu == pytest.approx(1.0, abs=1e-9)
    assert set(rep.per_piece) == {"A_ext1", "A_ext2", "A_int"}


def test_disjoint_competitor_under_strict_weights(unit_equal):
    r = (3 / (4 * math.pi)) ** (1 / 3)
    rep = relative_area(disjoint_spheres(3, r, r), unit_equal)
    assert rep.Q_S == pytest.approx(8 * math.pi * r * r, rel=1e-12)
    assert rep.mu == pytest.approx(8 * math.pi * r * r / Q_EQ, rel=1e-12)
    assert rep.mu > 1


def test_single_sphere_class():
    alpha = ProblemInstance.of(3, 1, 0, 1, 1, 1)
    assert relative_area(construct(alpha).network(), alpha).mu == pytest.approx(1.0, abs=1e-12)


def test_class_mismatch_reports_volumes(unit_equal):
    net = construct(ProblemInstance.of(3, 1, 2, 1, 1, 1)).network()
    with pytest.raises(ClassMismatch) as info:
        relative_area(net, unit_equal)
    assert info.value.measured == pytest.approx((1, 2), rel=1e-9)
    assert "CLASS_MISMATCH" in str(info.value)


def test_class_tolerance_boundary(unit_equal):
    net = construct(unit_equal).network()
    check_class(net.scaled(1 + 1e-8), unit_equal)
    with pytest.raises(ClassMismatch):
        check_class(net.scaled(1 + 1e-5), unit_equal)


def test_invalid_competitor_rejected(unit_equal):
    with pytest.raises(StructuralError):
        relative_area(hollow_network(), unit_equal)


def test_dimension_mismatch(unit_equal):
    with pytest.raises(DomainError):
        relative_area(construct(unit_equal.replace(n=4)).network(), unit_equal)


@pytest.mark.parametrize("i, piece", [(1, "A_ext1"), (0, "A_int"), (2, "A_ext2")])
def test_first_variation_weight(unit_equal, i, piece):
    fd, area = first_variation_weight(unit_equal, i, 1e-4)
    assert area == pytest.approx(measured(construct(unit_equal))[piece], rel=1e-14)
    assert fd == pytest.approx(area, abs=1e-5)


def test_first_variation_weight_symmetric(unit_equal):
    assert first_variation_weight(unit_equal, 1)[0] == pytest.approx(
        first_variation_weight(unit_equal, 2)[0], rel=1e-9)


def test_first_variation_weight_rejects_boundary():
    with pytest.raises(DomainError):
        first_variation_weight(ProblemInstance.of(3, 1, 1, 2, 1, 1), 0)


def test_single_sphere_pressure():
    alpha = ProblemInstance.of(3, 1, 0, 1, 0.7, 1)
    r = construct(alpha).radii[0]
    out = first_variation_volume(alpha, 1, 1e-4)
    assert out["pressure"] == pytest.approx(2 / r * 0.7, rel=1e-14)
    assert out["dQ_dV"] == pytest.approx(out["pressure"], rel=1e-7)


def test_equal_pressures(unit_equal):
    p = pressures(unit_equal)
    assert p["p1"] == pytest.approx(p["p2"], rel=1e-13)
    assert p["interface"] == 0.0


@pytest.mark.parametrize("alpha", [
    ProblemInstance.of(3, 1, 2, 1, 1, 1),
    ProblemInstance.of(3, 1, 0.4, 0.6, 1, 0.8),
    ProblemInstance.of(4, 0.5, 1, 0.9, 0.7, 1),
])
def test_pressure_difference_is_interface_term(alpha):
    for i in (1, 2):
        out = first_variation_volume(alpha, i, 1e-4)
        assert out["dQ_dV"] == pytest.approx(out["pressure"], abs=1e-6)
        assert out["p1_minus_p2"] == pytest.approx(out["interface_term"], abs=1e-12)
    # interface bulges into the larger bubble: positive term when V1 < V2
    sign = math.copysign(1, alpha.v2 - alpha.v1)
    w = alpha.weights
    if w.w1 == w.w2:
        assert math.copysign(1, pressures(alpha)["interface"]) == sign


def test_sweep_zero_amplitude_row():
    grid = SweepGrid(v2=(0.5, 1.0), w0=(0.6,), w2=(1.0,), epsilons=(0.0,))
    rows = sweep(grid)
    assert [r["status"] for r in rows] == ["ok"] * len(rows)
    assert all(r["mu_min"] == pytest.approx(1.0, abs=1e-9) for r in rows)
    assert set(rows[0]) == set(SWEEP_COLUMNS)


def test_sweep_cell_records_not_applicable():
    row = sweep_cell(ProblemInstance.of(3, 1, 0, 1, 1, 1), "JUNCTION_SLIDE", 0.01)
    assert row["status"] == "n/a"
    assert math.isnan(row["mu_min"])


def test_sweep_cell_records_errors():
    row = sweep_cell(ProblemInstance.of(3, 1, 1, 1, 1, 1), "NOPE", 0.01)
    assert row["status"].startswith("error")


def test_degenerate_cells_reach_one_at_zero_amplitude():
    alpha = ProblemInstance.of(3, 1, 0.5, 2, 1, 1)
    row = sweep_cell(alpha, "RADIAL_BUMP", 0.0)
    assert row["mu_min"] == pytest.approx(1.0, abs=1e-9)
    assert sweep_cell(alpha, "RADIAL_BUMP", 0.03)["mu_min"] > 1


def test_parallel_sweep_matches_serial():
    grid = SweepGrid(v2=(0.5,), w0=(0.6, 1.0), w2=(0.8,), epsilons=(0.03,))
    assert sweep(grid, jobs=2) == sweep(grid)


def test_net_serialization_keeps_mu(tmp_path, unequal):
    net = construct(unequal).network()
    net.save(tmp_path / "m.json")
    back = GeneratingNetwork.load(tmp_path / "m.json")
    assert relative_area(back, unequal).mu == pytest.approx(1.0, abs=1e-12)
