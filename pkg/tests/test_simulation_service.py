import numpy as np
import pytest
from scipy import stats

from deconv.core.exceptions import PreconditionError
from deconv.models.scenario import DistributionSpec
from deconv.services.distribution_service import DistributionService
from deconv.services.neumann_deconv import NeumannDeconvService
from deconv.services.scenario_store import ScenarioStore
from deconv.services.simulation_service import SimulationService
from tests.conftest import SCENARIO_DIR


def _load(name, *overrides):
    return ScenarioStore.load(SCENARIO_DIR / f"{name}.yaml", overrides)


def test_sample_is_deterministic():
    target = DistributionSpec(family="poisson", params={"lam": 2.0})
    noise = DistributionSpec(family="normal", params={"sd": 1.0})
    first = SimulationService.sample(target, noise, 50, seed=7, replication=3)
    again = SimulationService.sample(target, noise, 50, seed=7, replication=3)
    other = SimulationService.sample(target, noise, 50, seed=7, replication=4)
    assert np.array_equal(first.obs, again.obs)
    assert not np.array_equal(first.obs, other.obs)


def test_run_is_deterministic():
    scenario = _load("fig1", "replications=20", "n=50")
    a = SimulationService.run_scenario(scenario)
    b = SimulationService.run_scenario(scenario)
    assert a.est_mean == b.est_mean
    assert [r.est_sd for r in a.rows] == [r.est_sd for r in b.rows]


def test_aggregate_is_permutation_invariant(rng):
    columns = rng.normal(size=(37, 4)) * 1e3
    means, sds = SimulationService.aggregate(columns)
    shuffled = columns[rng.permutation(37)]
    means2, sds2 = SimulationService.aggregate(shuffled)
    assert means == means2
    assert sds == sds2


def test_single_replication_has_zero_sd():
    frame = SimulationService.run_scenario(_load("fig1", "replications=1", "n=1"))
    assert frame.replications == 1
    assert all(row.est_sd == 0.0 for row in frame.rows)


def test_keep_replications():
    frame = SimulationService.run_scenario(
        _load("fig1", "replications=3", "n=20", "estimator.keep_replications=true")
    )
    assert len(frame.per_replication) == 3
    assert all(len(curve) == 5 for curve in frame.per_replication)


def test_lattice_plugin_is_unbiased():
    frame = SimulationService.run_scenario(_load("fig1"))
    assert frame.replications == 2000
    for row in frame.rows:
        se = row.est_sd / np.sqrt(frame.replications)
        assert abs(row.est_mean - row.fx_true) <= 3.0 * se + 1e-12


def test_normal_plugin_is_unbiased_for_the_deconvolution_function():
    scenario = _load("fig6", "grid.min=-1", "grid.max=1", "grid.step=1")
    frame = SimulationService.run_scenario(scenario)
    grid = np.array(frame.xi)
    noise = DistributionService.noise_model(scenario.noise)
    law_y = DistributionService.observation_mixture(scenario.target, scenario.noise)
    expected = NeumannDeconvService.deconv_fn(
        SimulationService.eta_of(scenario), noise, law_y, grid, scenario.estimator.m
    )
    for row, value in zip(frame.rows, expected):
        se = row.est_sd / np.sqrt(frame.replications)
        assert abs(row.est_mean - value) <= 3.0 * se


@pytest.mark.parametrize(
    "name,tol", [("fig1", 1e-10), ("fig1_uniform", 1e-10), ("fig2", 1e-9), ("fig3", 1e-9), ("fig4", 1e-8)]
)
def test_exact_curves_recover_the_target(name, tol):
    frame = SimulationService.run_scenario(_load(name, "estimator.source=exact"))
    assert frame.replications == 1
    for row in frame.rows:
        assert row.est_sd == 0.0
        assert row.est_mean == pytest.approx(row.fx_true, abs=tol)


def test_exact_neumann_curve_approaches_target():
    frame = SimulationService.run_scenario(_load("fig5"))
    errors = [abs(row.est_mean - row.fx_true) for row in frame.rows]
    assert max(errors) < 0.05
    assert frame.rows[40].fy_true == pytest.approx(0.5)


def test_exact_neumann_error_shrinks_with_m():
    errors = []
    for m in (5, 15, 30):
        frame = SimulationService.run_scenario(_load("fig5", f"estimator.m={m}"))
        errors.append(max(abs(row.est_mean - row.fx_true) for row in frame.rows))
    assert errors[0] > errors[1] > errors[2]


def test_shifted_noise_scenario_runs():
    frame = SimulationService.run_scenario(_load("fig5_shifted"))
    assert np.all(np.isfinite(frame.est_mean))
    assert frame.rows[45].fy_true == pytest.approx(0.5)


def test_observation_density():
    target = DistributionSpec(family="exponential", params={"rate": 2.0})
    noise = DistributionSpec(family="poisson", params={"lam": 1.0})
    fY = DistributionService.observation_pdf(target, noise)
    x = np.array([0.5, 1.5, 3.25])
    expected = sum(stats.poisson.pmf(k, 1.0) * stats.expon.pdf(x - k, scale=0.5) for k in range(40))
    assert np.allclose(fY(x), expected, rtol=0, atol=1e-10)
    normal = DistributionSpec(family="normal", params={"sd": 1.0})
    both = DistributionService.observation_pdf(normal, DistributionSpec(family="normal", params={"sd": 0.5}))
    assert np.allclose(both(x), stats.norm.pdf(x, scale=np.sqrt(1.25)), rtol=0, atol=1e-14)
    assert DistributionService.observation_pdf(noise, noise) is None
    with pytest.raises(PreconditionError):
        DistributionService.pdf_fn(noise)


def test_eta_from_scenario():
    scenario = _load("fig6", "estimator.eta=[[0.5, 0.0], [0.25, 0.1]]")
    eta = SimulationService.eta_of(scenario)
    assert eta.locations.tolist() == [0.0, 0.1]
    assert eta.coeffs.tolist() == [0.5, 0.25]


@pytest.mark.parametrize(
    "family,params,mean",
    [
        ("poisson", {"lam": 1.5}, 1.5),
        ("bernoulli", {"p": 0.3}, 0.3),
        ("geometric", {"p": 0.4}, 1.5),
        ("uniform", {"K": 3}, 1.5),
        ("lattice", {"weights": [0.3, 0.4, 0.3], "z0": -1, "t": 0.5}, -0.5),
        ("degenerate", {"at": 2.0}, 2.0),
        ("normal", {"mean": 1.0, "sd": 2.0}, 1.0),
        ("laplace", {"loc": -1.0, "scale": 1.0}, -1.0),
        ("exponential", {"rate": 2.0, "loc": 1.0}, 1.5),
    ],
)
def test_draw_matches_scipy_law(rng, family, params, mean):
    spec = DistributionSpec(family=family, params=params)
    draws = DistributionService.draw(spec, 20_000, rng)
    cdf = DistributionService.cdf_fn(spec)
    assert abs(draws.mean() - mean) <= 5.0 * max(draws.std(), 1e-12) / np.sqrt(len(draws))
    for q in np.quantile(draws, [0.25, 0.5, 0.75]):
        assert abs(np.mean(draws <= q) - float(cdf(q))) < 0.02


def test_observation_cdf_mixes_lattice_and_continuous():
    target = DistributionSpec(family="lattice", params={"weights": [0.3, 0.4, 0.3]})
    noise = DistributionSpec(family="exponential", params={"rate": 1.0})
    FY = DistributionService.observation_cdf(target, noise)
    x = np.array([0.5, 2.5])
    expected = sum(w * stats.expon.cdf(x - k) for k, w in enumerate([0.3, 0.4, 0.3]))
    assert np.allclose(FY(x), expected, rtol=0, atol=1e-14)


def test_lattice_target_may_start_with_zero_mass():
    spec = DistributionSpec(family="lattice", params={"weights": [0.0, 0.5, 0.5]})
    law = DistributionService.as_mixture(spec)
    assert law.locations.tolist() == [1.0, 2.0]
    with pytest.raises(ValueError):
        DistributionService.lattice_noise(spec)
