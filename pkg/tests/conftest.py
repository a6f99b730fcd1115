from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings as hsettings

from deconv.models.noise import LatticeNoise, NormalNoise
from deconv.models.scenario import DistributionSpec
from deconv.services.distribution_service import DistributionService

hsettings.register_profile("deconv", deadline=None, max_examples=60)
hsettings.load_profile("deconv")

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def lattice(family: str, **params) -> LatticeNoise:
    return DistributionService.lattice_noise(DistributionSpec(family=family, params=params))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def poisson_noise() -> LatticeNoise:
    return lattice("poisson", lam=1.0)


@pytest.fixture
def geometric_noise() -> LatticeNoise:
    return lattice("geometric", p=0.5)


@pytest.fixture
def example_noises():
    """Bernoulli with u(0)=0.7, geometric 0.4, Poisson 1.5, uniform K=3"""
    return {
        "bernoulli": lattice("bernoulli", p=0.3),
        "geometric": lattice("geometric", p=0.4),
        "poisson": lattice("poisson", lam=1.5),
        "uniform": lattice("uniform", K=3),
    }


@pytest.fixture
def normal_noise() -> NormalNoise:
    return NormalNoise(c=0.0, sigma=0.5)


@pytest.fixture
def scenario_dir() -> Path:
    return SCENARIO_DIR
