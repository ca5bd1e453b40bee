import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from movingwells import (DomainError, ParameterError, SamplingSpec, SpatialDomain, WellField,
                         audit_hypotheses, build_potential, make_annular_potential)


def test_quartic_vanishes_at_well(quartic_2d):
    assert quartic_2d([0.5], [1.0, 0.0]) == pytest.approx(0.0, abs=1e-14)


def test_quartic_at_origin(quartic_2d):
    assert quartic_2d([0.5], [0.0, 0.0]) == pytest.approx(1.0, abs=1e-14)


def test_min_power_at_origin(min_power_2d):
    assert min_power_2d([0.5], [0.0, 0.0]) == pytest.approx(1.0, abs=1e-14)


def test_out_of_domain_point_raises(quartic_2d):
    with pytest.raises(DomainError):
        quartic_2d([1.5], [0.0, 0.0])


@pytest.fixture
def linear_wells(unit_interval):
    return build_potential(unit_interval, WellField.expression(unit_interval, [["1 + x/2"]]))


def test_adjusted_potential_zero_at_reference_well(linear_wells, quartic_moving, min_power_2d):
    for pot in (linear_wells, quartic_moving, min_power_2d):
        e1 = np.zeros(pot.M)
        e1[0] = 1.0
        assert pot.adjusted([0.3], e1) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("x, expected", [(0.0, 1.0), (1.0, 1.5**4)])
def test_adjusted_potential_at_origin(linear_wells, x, expected):
    assert linear_wells.adjusted([x], [0.0]) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("family", ["quartic", "min_power"])
def test_wells_are_zeros_on_sample_grid(unit_interval, family):
    wells = WellField.expression(unit_interval, [["cos(x)", "1 + x**2"]])
    pot = build_potential(unit_interval, wells, family=family)
    xs = np.linspace(0, 1, 41)[:, None]
    lo, hi = pot.wells.wells(xs)
    assert np.max(np.abs(pot(xs, lo))) <= 1e-12
    assert np.max(np.abs(pot(xs, hi))) <= 1e-12


def test_adjustment_scales_norms_and_round_trips(unit_interval, rng):
    wells = WellField.expression(unit_interval, [["cos(x)", "1 + x**2"]])
    pot = build_potential(unit_interval, wells)
    T = pot.adjustment
    x = rng.uniform(0, 1, (100, 1))
    w = rng.normal(size=(100, 2))
    u = T(x, w)
    a_norm = np.linalg.norm(pot.wells(x), axis=-1)
    c = pot.wells.center(x)
    assert np.allclose(np.linalg.norm(u - c, axis=-1), a_norm * np.linalg.norm(w, axis=-1),
                       atol=1e-12)
    assert np.allclose(T.inverse(x, u), w, atol=1e-12)
    assert np.allclose(T(x, np.tile([1.0, 0.0], (100, 1))), pot.wells(x) + c, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(0, 1), w=st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_adjustment_round_trip_three_components(x, w):
    dom = SpatialDomain([0.0], [1.0])
    pot = build_potential(dom, WellField.expression(dom, [["0.1 + x", "x**2", "1"]]))
    u = pot.adjustment([x], np.array(w))
    assert np.allclose(pot.adjustment.inverse([x], u), w, atol=1e-11)


def test_audit_moving_quartic_passes(quartic_moving):
    report = audit_hypotheses(quartic_moving, SamplingSpec())
    assert report.passed, [r for r in report.rows() if not r["passed"]]


def test_audit_min_power_passes(min_power_2d):
    assert audit_hypotheses(min_power_2d, SamplingSpec()).passed


def test_audit_constant_wells_have_zero_modulus(quartic_fixed):
    entry = audit_hypotheses(quartic_fixed, SamplingSpec())["relative_continuity"]
    assert entry.passed and entry.worst == 0.0


def test_audit_flags_separation_violation(unit_interval):
    wells = WellField.expression(unit_interval, [["0.5 + x"]], delta=1.0)
    entry = audit_hypotheses(build_potential(unit_interval, wells), SamplingSpec())["well_separation"]
    assert not entry.passed
    assert entry.witness["x"] == pytest.approx([0.0])


def test_annular_channel_value_on_outer_circle():
    eps = [1e-3, 1e-4]
    pot = make_annular_potential(1, level=1.0, eps=eps)
    assert pot([0.5], [1.0, 0.0]) == pytest.approx(eps[0], rel=1e-12)


def test_annular_wall_value():
    pot = make_annular_potential(1, level=1.0)
    assert pot([0.5], [0.875, 0.0]) == pytest.approx(1.0)


def test_annular_wells_vanish():
    pot = make_annular_potential(3)
    assert pot([0.5], [0.0, 1.0]) == 0.0
    assert pot([0.5], [0.0, 0.0]) == 0.0


def test_annular_rejects_nonmonotone_sequence():
    with pytest.raises(ParameterError):
        make_annular_potential(2, eps=[1e-3, 2e-3, 1e-4])


def test_annular_is_nonnegative(rng):
    pot = make_annular_potential(4)
    u = rng.uniform(-1.2, 1.2, (5000, 2))
    assert np.all(pot(np.full((5000, 1), 0.5), u) >= 0)
