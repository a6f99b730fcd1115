import math

import numpy as np
import pytest
from scipy import stats

from deconv.core.exceptions import DivergenceError, PreconditionError, SingularCoefficientError
from deconv.models.measures import SignedMixture
from deconv.models.noise import LatticeNoise, ProbeNoise, SupportGrid
from deconv.models.samples import EmpiricalSample
from deconv.models.scenario import DistributionSpec
from deconv.models.sequences import DoubleSeq, RightLateralSeq
from deconv.services.discrete_deconv import DiscreteDeconvService, MonotoneMode, RightLateralMode
from deconv.services.distribution_service import DistributionService
from deconv.services.neumann_deconv import NeumannDeconvService
from deconv.services.seq_core import SeqCoreService
from deconv.utils.numeric import close

SIGMA = 2.0


def _laplace_bernoulli(p):
    u = RightLateralSeq.from_values([1.0 - p, p])

    def FY(x):
        x = np.asarray(x, dtype=float)
        return (1.0 - p) * stats.laplace.cdf(x, scale=SIGMA) + p * stats.laplace.cdf(x - 1.0, scale=SIGMA)

    kappa = (1.0 - p) + p * math.exp(-1.0 / SIGMA)
    eb = p * math.exp(-1.0 / SIGMA) / (1.0 - p)
    return u, FY, kappa, eb


def _observation(pmf_x, noise):
    return SignedMixture.atoms(np.arange(len(pmf_x), dtype=float), pmf_x).convolve(
        SignedMixture.atoms(noise.locations, noise.weights)
    )


@pytest.mark.parametrize("name", ["bernoulli", "geometric", "poisson", "uniform"])
def test_deconv_single_round_trip(example_noises, rng, name):
    u = example_noises[name].pmf
    for _ in range(5):
        q = RightLateralSeq.from_values(rng.uniform(-1.0, 1.0, int(rng.integers(1, 13))))
        r = SeqCoreService.conv(q, u)
        recovered = DiscreteDeconvService.deconv_single(r, u)
        full = recovered.window(0, r.end - 1)
        expected = q.window(0, r.end - 1)
        assert close(full, expected, rel=1e-10, abs_tol=1e-12)


def test_deconv_general_round_trip(rng):
    for _ in range(10):
        lmax = int(rng.integers(0, 12))
        table = rng.uniform(-0.5, 0.5, (lmax + 1, lmax + 1))
        table[:, 0] = rng.uniform(0.5, 1.5, lmax + 1)
        p = DoubleSeq(provider=lambda ell, z, t=table: t[ell, z], lmax=lmax)
        q = RightLateralSeq.from_values(rng.uniform(-1.0, 1.0, lmax + 1))
        r = DiscreteDeconvService.forward_general(q, p)
        recovered = DiscreteDeconvService.deconv_general(r, p)
        assert close(recovered.coeffs, q.coeffs, rel=1e-10)


def test_deconv_general_agrees_with_single(example_noises, rng):
    u = example_noises["poisson"].pmf
    q = RightLateralSeq.from_values(rng.uniform(0.0, 1.0, 8))
    r = SeqCoreService.truncate(SeqCoreService.conv(q, u), 7)
    general = DiscreteDeconvService.deconv_general(r, DoubleSeq.from_single(u, 7))
    single = DiscreteDeconvService.deconv_single(r, u)
    assert close(general.coeffs, single.window(0, 7), rel=1e-10)


def test_deconv_single_singular():
    with pytest.raises(SingularCoefficientError):
        DiscreteDeconvService.deconv_single(RightLateralSeq.from_values([1.0]), RightLateralSeq.from_values([0.0, 1.0]))


def test_laplace_bernoulli_partial_sums():
    xi = -1.0
    for p in (0.3, 0.7):
        u, FY, kappa, eb = _laplace_bernoulli(p)
        sums = DiscreteDeconvService.partial_sums(FY, u, xi, 51)
        T = np.arange(51)
        formula = 0.5 * kappa * math.exp(xi / SIGMA) * (1.0 - (-eb) ** (T + 1)) / (1.0 + eb)
        assert np.allclose(sums.real, formula, rtol=1e-9, atol=1e-12)


def test_laplace_bernoulli_converges_below_threshold():
    u, FY, _, eb = _laplace_bernoulli(0.3)
    assert eb < 1.0
    value = DiscreteDeconvService.deconv_df_pointwise(FY, u, -1.0, MonotoneMode())
    assert value == pytest.approx(0.5 * math.exp(-1.0 / SIGMA), abs=1e-6)


def test_laplace_bernoulli_diverges_above_threshold():
    u, FY, _, eb = _laplace_bernoulli(0.7)
    assert eb > 1.0
    with pytest.raises(DivergenceError) as info:
        DiscreteDeconvService.deconv_df_pointwise(FY, u, -1.0, MonotoneMode())
    assert len(info.value.partial_sums) >= 30
    assert info.value.exit_code == 3


def test_laplace_bernoulli_at_threshold_reports_divergence():
    p = 1.0 / (1.0 + math.exp(-1.0 / SIGMA))
    u, FY, _, eb = _laplace_bernoulli(p)
    assert eb == pytest.approx(1.0)
    with pytest.raises(DivergenceError):
        DiscreteDeconvService.deconv_df_pointwise(FY, u, -1.0, MonotoneMode(max_terms=500))


def test_right_lateral_mode_is_finite_sum():
    u = RightLateralSeq.from_values([0.5, 0.5])
    FY = lambda x: np.clip(np.floor(np.asarray(x, dtype=float)) + 1.0, 0.0, None)
    value = DiscreteDeconvService.deconv_df_pointwise(FY, u, 2.0, RightLateralMode(xi0=0.0))
    gamma = [1.0, -1.0, 1.0]
    expected = sum(g * FY(2.0 - z) for z, g in enumerate(gamma)) / 0.5
    assert value == pytest.approx(float(expected))
    assert DiscreteDeconvService.deconv_df_pointwise(FY, u, -0.5, RightLateralMode(xi0=0.0)) == 0.0


def test_cor3_finite_representation_matches_truth(poisson_noise):
    target = DistributionSpec(family="exponential", params={"rate": 1.0})
    noise_spec = DistributionSpec(family="poisson", params={"lam": 1.0})
    FY = DistributionService.observation_cdf(target, noise_spec)
    eta = NeumannDeconvService.default_eta(poisson_noise)
    for xi in np.linspace(0.25, 6.0, 10):
        truth = 1.0 - math.exp(-xi)
        cor3 = DiscreteDeconvService.cor3_df_deconv(poisson_noise, FY, float(xi), RightLateralMode(xi0=0.0))
        m0 = NeumannDeconvService.finite_rep_check(poisson_noise, float(xi), 0.0)
        neumann = NeumannDeconvService.deconv_fn(eta, poisson_noise, FY, float(xi), m0)
        assert cor3 == pytest.approx(truth, abs=1e-9)
        assert neumann == pytest.approx(truth, abs=1e-9)


def test_cor3_two_sided_target_in_monotone_mode(poisson_noise):
    target = DistributionSpec(family="laplace", params={"scale": 1.0})
    noise_spec = DistributionSpec(family="poisson", params={"lam": 1.0})
    FY = DistributionService.observation_cdf(target, noise_spec)
    for xi in (-2.0, 0.0, 1.5):
        value = DiscreteDeconvService.cor3_df_deconv(poisson_noise, FY, xi)
        assert value == pytest.approx(float(stats.laplace.cdf(xi)), abs=1e-8)


def test_cor1_recovers_lattice_pmf(poisson_noise):
    pmf_x = np.array([0.3, 0.4, 0.3, 0.0, 0.0])
    grid = SupportGrid.equidistant(0.0, 1.0, 5)
    law = _observation(pmf_x, poisson_noise)
    pmf = DiscreteDeconvService.cor1_pmf_deconv(grid, poisson_noise.atom, 0.0, law.atom_mass)
    assert close(pmf.real(), pmf_x, rel=1e-10, abs_tol=1e-12)
    df = DiscreteDeconvService.cor1_df(grid, poisson_noise.atom, 0.0, law.atom_mass, [-0.5, 0.0, 1.5, 4.0])
    assert close(df, [0.0, 0.3, 0.7, 1.0], rel=1e-10)


def test_cor1_non_equidistant_grid():
    # X on {0, 1, 3}, errors on {0, 1}: the double-index form is needed
    noise = LatticeNoise.from_weights([0.6, 0.4])
    xi = np.array([0.0, 1.0, 3.0])
    pmf_x = np.array([0.2, 0.5, 0.3])
    law = SignedMixture.atoms(xi, pmf_x).convolve(SignedMixture.atoms(noise.locations, noise.weights))
    grid = SupportGrid(points=xi)
    pmf = DiscreteDeconvService.cor1_pmf_deconv(grid, noise.atom, 0.0, law.atom_mass)
    assert close(pmf.real(), pmf_x, rel=1e-10)
    assert close(DiscreteDeconvService.pmf_to_df(pmf), np.cumsum(pmf_x), rel=1e-10)
    with pytest.raises(PreconditionError):
        DiscreteDeconvService.cor1_df(grid, noise.atom, 0.0, law.atom_mass, [1.0])


def test_cor2_recovers_lattice_pmf():
    target = DistributionSpec(family="lattice", params={"weights": [0.3, 0.4, 0.3]})
    noise = DistributionSpec(family="exponential", params={"rate": 1.0})
    FY = DistributionService.observation_cdf(target, noise)
    Feps = DistributionService.cdf_fn(noise)
    grid = SupportGrid.equidistant(0.0, 1.0, 5)
    pmf = DiscreteDeconvService.cor2_pmf_deconv(grid, Feps, 0.0, FY)
    assert close(pmf.real(), [0.3, 0.4, 0.3, 0.0, 0.0], rel=1e-10, abs_tol=1e-12)

    probes = SupportGrid.equidistant(0.0, 1.0, 5, probes=np.arange(5) + 0.5)
    pmf = DiscreteDeconvService.cor2_pmf_deconv(probes, Feps, 0.0, FY)
    assert close(pmf.real(), [0.3, 0.4, 0.3, 0.0, 0.0], rel=1e-10, abs_tol=1e-12)


def test_cor2_probe_violation_names_index():
    noise = DistributionSpec(family="exponential", params={"rate": 1.0})
    grid = SupportGrid.equidistant(0.0, 1.0, 4, probes=[0.5, 1.5, 3.5, 3.5])
    with pytest.raises(PreconditionError) as info:
        DiscreteDeconvService.cor2_pmf_deconv(grid, DistributionService.cdf_fn(noise), 0.0, lambda x: x)
    assert info.value.index == 2


def test_cor2_needs_vanishing_error_cdf_at_z0():
    noise = DistributionSpec(family="exponential", params={"rate": 1.0})
    grid = SupportGrid.equidistant(0.0, 1.0, 3)
    with pytest.raises(PreconditionError):
        DiscreteDeconvService.cor2_pmf_deconv(grid, DistributionService.cdf_fn(noise), 1.0, lambda x: x)


def test_plugin_single_observation(poisson_noise):
    # one observation: the estimate is a scaled step of Θ{γ}
    sample = EmpiricalSample(obs=[1.0])
    grid = [0.0, 1.0, 2.0]
    est = DiscreteDeconvService.plugin_estimator(sample, poisson_noise, grid, "fig1")
    gamma = [1.0, -1.0, 0.5]
    expected = [0.0, gamma[0], gamma[0] + gamma[1]]
    assert close(est, np.array(expected) / poisson_noise.pmf0, rel=1e-10)


def test_plugin_rejects_bad_input(poisson_noise):
    with pytest.raises(PreconditionError):
        DiscreteDeconvService.plugin_estimator(EmpiricalSample(obs=[]), poisson_noise, [0.0])
    with pytest.raises(PreconditionError):
        DiscreteDeconvService.plugin_estimator(EmpiricalSample(obs=[1.0]), poisson_noise, [0.0], "fig9")


def test_plugin_fig2_expectation_is_exact():
    # quantile grid of ε under each atom of X; the e.d.f. is within 1/2000 of F_Y
    target = DistributionSpec(family="lattice", params={"weights": [0.5, 0.5]})
    noise = DistributionSpec(family="exponential", params={"rate": 2.0})
    probe = ProbeNoise(z0=0.0, sigma=1.0, span=1.0, cdf=DistributionService.cdf_fn(noise))
    eps = stats.expon.ppf((np.arange(2000) + 0.5) / 2000, scale=0.5)
    sample = EmpiricalSample(obs=np.concatenate([eps, 1.0 + eps]))
    est = DiscreteDeconvService.plugin_estimator(sample, probe, [0.0, 1.0, 2.0], "fig2", xi0=0.0)
    assert close(est, [0.5, 1.0, 1.0], rel=0.05)


def test_pool_estimates():
    pooled = DiscreteDeconvService.pool_estimates([np.array([1.0, 0.0]), np.array([0.0, 1.0])], [1, 3])
    assert close(pooled, [0.25, 0.75])


def test_plugin_is_linear_in_samples(poisson_noise, rng):
    a = EmpiricalSample(obs=rng.poisson(2.0, 30).astype(float))
    b = EmpiricalSample(obs=rng.poisson(2.0, 50).astype(float))
    grid = [0.0, 1.0, 2.0, 3.0]
    pooled = DiscreteDeconvService.pool_estimates(
        [DiscreteDeconvService.plugin_estimator(s, poisson_noise, grid) for s in (a, b)], [a.n, b.n]
    )
    joint = DiscreteDeconvService.plugin_estimator(a.pooled(b), poisson_noise, grid)
    assert close(pooled, joint, rel=1e-12)

