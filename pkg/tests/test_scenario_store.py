import pytest

from deconv.core.exceptions import ScenarioError
from deconv.models.scenario import EstimatorName
from deconv.services.scenario_store import ScenarioStore
from tests.conftest import SCENARIO_DIR


@pytest.mark.parametrize("name", ["fig1", "fig1_uniform", "fig2", "fig3", "fig4", "fig5", "fig5_shifted", "fig6"])
def test_shipped_scenarios_load(name):
    scenario = ScenarioStore.load(SCENARIO_DIR / f"{name}.yaml")
    assert scenario.name == name
    assert len(scenario.grid.points()) > 0


def test_overrides_reach_nested_fields():
    scenario = ScenarioStore.load(
        SCENARIO_DIR / "fig5.yaml", ["estimator.m=5", "noise.params.sd=0.25", "name=short"]
    )
    assert scenario.estimator.m == 5
    assert scenario.noise.params["sd"] == 0.25
    assert scenario.name == "short"


def test_override_creates_missing_mapping():
    data = {"a": 1}
    ScenarioStore.apply_override(data, "b.c=[1, 2]")
    assert data == {"a": 1, "b": {"c": [1, 2]}}


@pytest.mark.parametrize("override", ["estimator", "=3", "n.value=3"])
def test_malformed_overrides(override):
    with pytest.raises(ScenarioError):
        ScenarioStore.load(SCENARIO_DIR / "fig1.yaml", [override])


def _fig1(**changes):
    data = {
        "target": {"family": "lattice", "params": {"weights": [0.3, 0.4, 0.3]}},
        "noise": {"family": "poisson", "params": {"lam": 1.0}},
        "estimator": {"name": "cor1"},
        "n": 10,
        "grid": {"min": 0, "max": 2, "step": 1},
    }
    data.update(changes)
    return data


def test_from_dict_defaults():
    scenario = ScenarioStore.from_dict(_fig1())
    assert scenario.estimator.name == EstimatorName.COR1
    assert scenario.replications == 1
    assert scenario.seed == 0


@pytest.mark.parametrize(
    "changes",
    [
        {"noise": {"family": "normal", "params": {"sd": 1.0}}},
        {"estimator": {"name": "neumann", "m": 50}},
        {"estimator": {"name": "neumann"}},
        {"estimator": {"name": "neumann", "m": 3, "eta": [[-1.0, 0.0]]}},
        {
            "noise": {"family": "exponential", "params": {"rate": 1.0}},
            "estimator": {"name": "cor2", "sigma": 1.5},
        },
        {"estimator": {"name": "cor2"}},
        {"noise": {"family": "bernoulli", "params": {"p": 1.0}}},
        {"noise": {"family": "poisson", "params": {}}},
        {"grid": {"min": 2, "max": 0, "step": 1}},
        {"n": 0},
        {
            "target": {"family": "laplace", "params": {"scale": 1.0}},
            "noise": {"family": "normal", "params": {"sd": 1.0}},
            "estimator": {"name": "neumann", "m": 3, "source": "exact"},
        },
    ],
)
def test_invalid_scenarios(changes):
    with pytest.raises(ScenarioError) as info:
        ScenarioStore.from_dict(_fig1(**changes))
    assert info.value.exit_code == 2


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        ScenarioStore.load(tmp_path / "nope.yaml")


def test_non_mapping_file(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ScenarioError):
        ScenarioStore.load(path)
