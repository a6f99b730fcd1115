import numpy as np
import pytest

from deconv.core.exceptions import PreconditionError
from deconv.models.measures import SignedMixture
from deconv.models.samples import EmpiricalSample
from deconv.services.fourier_oracle import FourierOracleService
from deconv.services.neumann_deconv import NeumannDeconvService
from tests.conftest import lattice


def _compare_at_random_t(rng, eta, noise, law_y, m):
    M = eta.convolve(NeumannDeconvService.neumann_sum(eta, noise, m))
    direct = FourierOracleService.cf_of(M.convolve(law_y))
    phi_eta = FourierOracleService.cf_of(eta)
    phi_eps = FourierOracleService.cf_of(noise)
    phi_y = FourierOracleService.cf_of(law_y)
    for t in rng.uniform(-5.0, 5.0, 20):
        closed = FourierOracleService.cf_deconv_closed(phi_eta, phi_eps, phi_y, float(t), m)
        assert abs(direct(float(t)) - closed) < 1e-8 * max(1.0, abs(closed))


def test_normal_mixture_matches_fourier_form(rng, normal_noise):
    law_y = SignedMixture.normal(0.0, 1.25)
    _compare_at_random_t(rng, SignedMixture.dirac(0.0), normal_noise, law_y, 20)


def test_lattice_mixture_matches_fourier_form(rng, poisson_noise):
    target = SignedMixture.atoms([0.0, 1.0, 2.0], [0.3, 0.4, 0.3])
    law_y = target.convolve(NeumannDeconvService.noise_measure(poisson_noise))
    eta = NeumannDeconvService.default_eta(poisson_noise)
    _compare_at_random_t(rng, eta, poisson_noise, law_y, 10)


def test_direct_and_closed_agree(normal_noise):
    phi_eta = FourierOracleService.cf_of(SignedMixture.dirac(0.0, coeff=0.8))
    phi_eps = FourierOracleService.cf_of(normal_noise)
    phi_y = FourierOracleService.cf_of(SignedMixture.normal(0.0, 2.0))
    for t in (-2.0, 0.0, 0.7, 3.1):
        closed = FourierOracleService.cf_deconv_closed(phi_eta, phi_eps, phi_y, t, 7)
        direct = FourierOracleService.cf_deconv_direct(phi_eta, phi_eps, phi_y, t, 7)
        assert closed == pytest.approx(direct, abs=1e-12)


def test_poisson_noise_leaves_convergence_region():
    noise = lattice("poisson", lam=2.0)
    phi_eta = FourierOracleService.cf_of(SignedMixture.dirac(0.0))
    phi_eps = FourierOracleService.cf_of(noise)
    assert abs(1.0 - phi_eps(5.0)) == pytest.approx(1.10, abs=0.01)
    assert FourierOracleService.convergence_region(phi_eta, phi_eps, [5.0]) == [False]
    assert FourierOracleService.convergence_region(phi_eta, phi_eps, [0.1]) == [True]


def test_cf_vectorised_and_scalar(normal_noise):
    phi = FourierOracleService.cf_of(normal_noise)
    values = phi(np.array([0.0, 1.0]))
    assert values.shape == (2,)
    assert phi(1.0) == pytest.approx(np.exp(-0.125))
    assert (phi * phi)(1.0) == pytest.approx(np.exp(-0.25))


def test_empirical_cf_envelope():
    n = 10_000
    t = np.linspace(-3.0, 3.0, 61)
    exact = np.exp(-0.5 * t ** 2)
    inside = 0
    for seed in range(5):
        obs = np.random.default_rng(seed).normal(0.0, 1.0, n)
        ecf = FourierOracleService.cf_of(EmpiricalSample(obs=obs))(t)
        inside += int(np.max(np.abs(ecf - exact)) < 3.0 / np.sqrt(n))
    assert inside >= 3


def test_cf_of_unsupported_object():
    with pytest.raises(PreconditionError):
        FourierOracleService.cf_of("not a law")


def _random_mixture(rng):
    size = int(rng.integers(1, 5))
    variances = np.where(rng.uniform(size=size) < 0.5, 0.0, rng.uniform(0.1, 2.0, size))
    return SignedMixture(coeffs=rng.normal(size=size), locations=rng.uniform(-3.0, 3.0, size), variances=variances)


def test_cf_properties_on_random_mixtures(rng):
    for _ in range(20):
        mu, nu = _random_mixture(rng), _random_mixture(rng)
        phi_mu, phi_nu = FourierOracleService.cf_of(mu), FourierOracleService.cf_of(nu)
        phi_conv = FourierOracleService.cf_of(mu.convolve(nu))
        t = rng.uniform(-5.0, 5.0, 20)
        assert np.allclose(phi_conv(t), phi_mu(t) * phi_nu(t), rtol=0, atol=1e-12)
        assert phi_mu(0.0) == pytest.approx(mu.total_mass(), abs=1e-12)
        assert np.allclose(phi_mu(-t), np.conj(phi_mu(t)), rtol=0, atol=1e-12)
        assert np.all(np.abs(phi_mu(t)) <= mu.coeff_norm() + 1e-12)
        combined = FourierOracleService.cf_of(mu + nu.scaled(0.5))
        assert np.allclose(combined(t), phi_mu(t) + 0.5 * phi_nu(t), rtol=0, atol=1e-12)
