import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goodwill.errors import AlignmentError, FormatError, ValidationError
from goodwill.growth import (
    ManagementPlan, Parametric, Scenario, ThinningEvent, closed_form_value, growth_rate_at,
    load_tabulated, simulate,
)
from goodwill.tables import render_trajectory

from conftest import EXAMPLE_CURVE

# 10000 * (1 - exp(-0.05 * 35))**2, evaluated with the math module
V_AT_40 = 6826.494965214281


def test_unthinned_value_matches_closed_form(example_scenario):
    traj = simulate(example_scenario, ManagementPlan(40.0), 1.0)
    assert traj.ages[-1] == 40.0
    assert traj.tree_value[-1] == pytest.approx(V_AT_40, rel=1e-12)
    assert 10000 * (1 - math.exp(-0.05 * 35)) ** 2 == pytest.approx(V_AT_40, rel=1e-15)


def test_no_thinning_has_no_impulses_and_zero_start(example_scenario):
    traj = simulate(example_scenario, ManagementPlan(40.0), 1.0)
    assert traj.impulses == ()
    assert traj.tree_value[0] == 0.0
    assert np.all(traj.tree_value[:6] == 0.0)


def test_single_thinning_scales_remaining_stand(example_scenario):
    plan = ManagementPlan(40.0, (ThinningEvent(30.0, 0.25),))
    traj = simulate(example_scenario, plan, 1.0)
    i = 30
    assert traj.tree_value[i] == pytest.approx(0.75 * traj.value_before[i], rel=1e-15)
    assert traj.value_before[i] == pytest.approx(EXAMPLE_CURVE.value(30.0), rel=1e-15)
    later = traj.ages > 30
    expected = 0.75 * EXAMPLE_CURVE.value(traj.ages[later])
    np.testing.assert_allclose(traj.tree_value[later], expected, rtol=1e-12)
    (imp,) = traj.impulses
    assert imp.kind == "thinning" and imp.time == 30.0
    assert imp.value_removed == pytest.approx(0.25 * EXAMPLE_CURVE.value(30.0), rel=1e-15)


def test_final_harvest_only_on_request(example_scenario):
    plan = ManagementPlan(40.0)
    assert simulate(example_scenario, plan, 1.0).final_harvest() is None
    final = simulate(example_scenario, plan, 1.0, final_harvest=True).final_harvest()
    assert final.time == 40.0 and final.value_removed == pytest.approx(V_AT_40, rel=1e-12)


def test_misaligned_thinning_rejected(example_scenario):
    plan = ManagementPlan(40.0, (ThinningEvent(30.1, 0.25),))
    with pytest.raises(AlignmentError):
        simulate(example_scenario, plan, 0.25)


@pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
def test_intensity_outside_unit_interval_rejected(q):
    with pytest.raises(ValidationError):
        ThinningEvent(30.0, q)


def test_plan_validation():
    with pytest.raises(ValidationError):
        ManagementPlan(40.0, (ThinningEvent(30.0, 0.2), ThinningEvent(20.0, 0.2)))
    with pytest.raises(ValidationError):
        ManagementPlan(40.0, (ThinningEvent(40.0, 0.2),))
    with pytest.raises(ValidationError):
        ManagementPlan(0.0)


@pytest.mark.parametrize("kwargs", [
    dict(v_max=0, k=0.1, m=2), dict(v_max=1, k=0, m=2), dict(v_max=1, k=0.1, m=0.5),
    dict(v_max=1, k=0.1, m=2, t0=-1),
])
def test_parametric_invariants(kwargs):
    with pytest.raises(ValidationError):
        Parametric(**kwargs)


def test_load_tabulated_interpolates_and_holds():
    model = load_tabulated([(0, 0), (50, 8000)])
    assert model.value(25) == 4000
    assert model.value(60) == 8000


def test_load_tabulated_rejects_non_monotone():
    with pytest.raises(FormatError) as exc:
        load_tabulated([(10, 100), (5, 50)])
    assert exc.value.row == 1


def test_load_tabulated_from_text_reports_row():
    text = "age_years,tree_value\n0,0\n10,-5\n20,100\n"
    with pytest.raises(FormatError, match="row 1"):
        load_tabulated(text)
    with pytest.raises(FormatError):
        load_tabulated("age_years,tree_value\n0,0\n")


def test_load_tabulated_from_file(tmp_path):
    path = tmp_path / "stand.csv"
    path.write_text(render_trajectory([0, 50], [0, 8000]), encoding="utf-8")
    assert load_tabulated(path).value(25) == 4000


def test_growth_rate_examples():
    assert growth_rate_at(EXAMPLE_CURVE, 3.0, 1.0) == 0.0
    assert growth_rate_at(EXAMPLE_CURVE, 5.0, 1.0) == 0.0
    tab = load_tabulated([(0, 0), (50, 8000)])
    assert growth_rate_at(tab, 20, 1.0) == 160
    assert growth_rate_at(tab, 20, 0.75) == 120


def test_parametric_derivative_matches_finite_differences():
    ages = np.linspace(6, 120, 50)
    eps = 1e-5
    fd = (EXAMPLE_CURVE.value(ages + eps) - EXAMPLE_CURVE.value(ages - eps)) / (2 * eps)
    np.testing.assert_allclose(EXAMPLE_CURVE.derivative(ages), fd, rtol=1e-7)


def test_tabulated_rate_integrates_back_to_endpoint():
    model = load_tabulated([(0, 0), (10, 500), (25, 3100), (40, 7300), (60, 9000)])
    h = 0.5
    ages = np.arange(0, 60 + h / 2, h)
    rates = model.derivative(ages)
    total = h * (rates.sum() - 0.5 * (rates[0] + rates[-1]))
    assert total == pytest.approx(9000.0, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(times=st.lists(st.integers(1, 59), min_size=1, max_size=3, unique=True),
       qs=st.lists(st.floats(0.05, 0.6), min_size=3, max_size=3),
       share=st.floats(0.1, 1.0))
def test_adding_thinnings_never_raises_later_value(times, qs, share):
    sc = Scenario("p", 800, 600, Parametric(15000, 0.035, 4, 5), thinned_growth_share=share)
    times = sorted(times)
    events = tuple(ThinningEvent(float(t), q) for t, q in zip(times, qs))
    full = simulate(sc, ManagementPlan(60.0, events), 1.0).tree_value
    fewer = simulate(sc, ManagementPlan(60.0, events[:-1]), 1.0).tree_value
    assert np.all(full <= fewer + 1e-9)


@settings(max_examples=60, deadline=None)
@given(times=st.lists(st.integers(1, 79), min_size=0, max_size=3, unique=True),
       qs=st.lists(st.floats(0.01, 0.9), min_size=3, max_size=3))
def test_proportional_response_end_value_is_product(times, qs):
    sc = Scenario("p", 800, 600, EXAMPLE_CURVE)
    events = tuple(ThinningEvent(float(t), q) for t, q in zip(sorted(times), qs))
    traj = simulate(sc, ManagementPlan(80.0, events), 0.5)
    expected = EXAMPLE_CURVE.value(80.0) * math.prod(1 - e.intensity for e in events)
    assert traj.tree_value[-1] == pytest.approx(expected, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(times=st.lists(st.integers(1, 59), min_size=0, max_size=3, unique=True),
       qs=st.lists(st.floats(0.05, 0.6), min_size=3, max_size=3),
       share=st.floats(0.1, 1.0))
def test_simulator_agrees_with_pointwise_evaluation(times, qs, share):
    sc = Scenario("p", 800, 600, Parametric(15000, 0.035, 4, 5), thinned_growth_share=share)
    plan = ManagementPlan(60.0, tuple(ThinningEvent(float(t), q)
                                      for t, q in zip(sorted(times), qs)))
    traj = simulate(sc, plan, 1.0)
    expected = [closed_form_value(sc, plan, a) for a in traj.ages]
    np.testing.assert_allclose(traj.tree_value, expected, rtol=1e-12, atol=1e-9)


def test_growth_share_reduces_growth_loss(pine):
    plan = ManagementPlan(60.0, (ThinningEvent(30.0, 0.3),))
    partial = simulate(pine, plan, 1.0)
    proportional = simulate(Scenario(pine.label, pine.bare_land_value, pine.regeneration_cost,
                                     pine.growth), plan, 1.0)
    assert partial.tree_value[30] == pytest.approx(proportional.tree_value[30])
    assert partial.tree_value[-1] > proportional.tree_value[-1]
    assert partial.growth_rate[40] == pytest.approx(
        (1 - 0.4 * 0.3) * pine.growth.derivative(40.0), rel=1e-12)
