import pytest

from goodwill.growth import ManagementPlan, Parametric, Scenario, Tabulated, ThinningEvent
from goodwill.scenarios import default_scenario, default_scenarios

EXAMPLE_CURVE = Parametric(v_max=10000.0, k=0.05, m=2.0, t0=5.0)


@pytest.fixture
def example_scenario():
    return Scenario("example", bare_land_value=1000.0, regeneration_cost=500.0,
                    growth=EXAMPLE_CURVE)


@pytest.fixture
def shipped():
    return default_scenarios()


@pytest.fixture
def pine():
    return default_scenario("pine_like_medium")


@pytest.fixture
def zero_growth():
    return Scenario("flat", bare_land_value=1000.0, regeneration_cost=0.0,
                    growth=Tabulated((0.0, 100.0), (0.0, 0.0)))


def plans_for(rotation=50.0):
    """No-thin, 1-thin and 2-thin plans used across ledger checks."""
    return [
        ManagementPlan(rotation),
        ManagementPlan(rotation, (ThinningEvent(30.0, 0.25),)),
        ManagementPlan(rotation, (ThinningEvent(25.0, 0.3), ThinningEvent(40.0, 0.2))),
    ]


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[number])
