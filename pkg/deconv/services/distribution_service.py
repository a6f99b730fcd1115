import logging
from typing import Callable, Optional

import numpy as np
from scipy import stats

from deconv.core.config import settings
from deconv.core.exceptions import PreconditionError
from deconv.models.measures import SignedMixture
from deconv.models.noise import LatticeNoise, NormalNoise, ProbeNoise
from deconv.models.scenario import DistributionSpec, Family
from deconv.models.sequences import RightLateralSeq
from deconv.utils.numeric import ArrayLike

logger = logging.getLogger(__name__)

# families whose inverse sequence has a closed form, with the parameter names it uses
_CLOSED_FORM_PARAMS = {
    Family.BERNOULLI: ("p",),
    Family.GEOMETRIC: ("p",),
    Family.POISSON: ("lam",),
    Family.UNIFORM: ("K",),
}


class DistributionService:
    """scipy/numpy backed evaluation and sampling of distribution specs"""

    @staticmethod
    def frozen(spec: DistributionSpec):
        p = spec.params
        if spec.family == Family.POISSON:
            return stats.poisson(float(p["lam"]))
        if spec.family == Family.BERNOULLI:
            return stats.bernoulli(float(p["p"]))
        if spec.family == Family.GEOMETRIC:
            return stats.geom(float(p["p"]), loc=-1)
        if spec.family == Family.UNIFORM:
            return stats.randint(0, int(p["K"]) + 1)
        if spec.family == Family.NEGBINOM:
            return stats.nbinom(float(p["r"]), float(p["p"]))
        if spec.family == Family.NORMAL:
            return stats.norm(float(p.get("mean", 0.0)), float(p["sd"]))
        if spec.family == Family.LAPLACE:
            return stats.laplace(float(p.get("loc", 0.0)), float(p["scale"]))
        if spec.family == Family.EXPONENTIAL:
            return stats.expon(float(p.get("loc", 0.0)), 1.0 / float(p["rate"]))
        return None

    @staticmethod
    def lattice_noise(spec: DistributionSpec) -> LatticeNoise:
        """Lattice pmf, truncated where the tail mass drops below the tolerance"""
        if not spec.is_lattice:
            raise PreconditionError(f"{spec.family.value} is not a lattice law")
        p = spec.params
        if spec.family == Family.LATTICE:
            return LatticeNoise.from_weights(p["weights"], z0=float(p.get("z0", 0.0)), t=float(p.get("t", 1.0)))
        if spec.family == Family.DEGENERATE:
            return LatticeNoise.degenerate(z0=float(p.get("at", 0.0)))
        dist = DistributionService.frozen(spec)
        top = int(dist.isf(settings.TAIL_TOL)) + 1
        weights = dist.pmf(np.arange(top + 1))
        tail = float(dist.sf(top))
        names = _CLOSED_FORM_PARAMS.get(spec.family)
        return LatticeNoise(
            pmf=RightLateralSeq.from_values(weights, tail_mass=max(tail, 0.0)),
            family=spec.family.value if names else None,
            params={name: float(p[name]) for name in names} if names else {},
        )

    @staticmethod
    def normal_noise(spec: DistributionSpec) -> NormalNoise:
        if spec.family != Family.NORMAL:
            raise PreconditionError(f"{spec.family.value} is not a normal law")
        return NormalNoise(c=float(spec.params.get("mean", 0.0)), sigma=float(spec.params["sd"]))

    @staticmethod
    def noise_model(spec: DistributionSpec):
        if spec.is_lattice:
            return DistributionService.lattice_noise(spec)
        return DistributionService.normal_noise(spec)

    @staticmethod
    def probe_noise(spec: DistributionSpec, sigma: float, span: float) -> ProbeNoise:
        return ProbeNoise(
            z0=spec.left_extremity, sigma=sigma, span=span, cdf=DistributionService.cdf_fn(spec)
        )

    @staticmethod
    def lattice_atoms(spec: DistributionSpec):
        """Locations and weights of a lattice law; the first weight may vanish"""
        p = spec.params
        if spec.family == Family.LATTICE:
            weights = np.asarray(p["weights"], dtype=float)
            return float(p.get("z0", 0.0)) + float(p.get("t", 1.0)) * np.arange(len(weights)), weights
        if spec.family == Family.DEGENERATE:
            return np.array([float(p.get("at", 0.0))]), np.ones(1)
        dist = DistributionService.frozen(spec)
        top = max(int(dist.isf(settings.TAIL_TOL)), 0) + 1
        support = np.arange(top + 1)
        return support.astype(float), dist.pmf(support)

    @staticmethod
    def as_mixture(spec: DistributionSpec) -> Optional[SignedMixture]:
        if spec.family == Family.NORMAL:
            return SignedMixture.normal(float(spec.params.get("mean", 0.0)), float(spec.params["sd"]) ** 2)
        if spec.is_lattice:
            return SignedMixture.atoms(*DistributionService.lattice_atoms(spec)).merged()
        return None

    @staticmethod
    def cdf_fn(spec: DistributionSpec) -> Callable[[ArrayLike], np.ndarray]:
        if spec.family in (Family.LATTICE, Family.DEGENERATE):
            return SignedMixture.atoms(*DistributionService.lattice_atoms(spec)).cdf
        dist = DistributionService.frozen(spec)
        return lambda x: dist.cdf(np.asarray(x, dtype=float))

    @staticmethod
    def pdf_fn(spec: DistributionSpec) -> Callable[[ArrayLike], np.ndarray]:
        if spec.is_lattice:
            raise PreconditionError(f"{spec.family.value} has no density")
        dist = DistributionService.frozen(spec)
        return lambda x: dist.pdf(np.asarray(x, dtype=float))

    @staticmethod
    def draw(spec: DistributionSpec, n: int, rng: np.random.Generator) -> np.ndarray:
        p = spec.params
        family = spec.family
        if family == Family.POISSON:
            return rng.poisson(float(p["lam"]), n).astype(float)
        if family == Family.BERNOULLI:
            return rng.binomial(1, float(p["p"]), n).astype(float)
        if family == Family.GEOMETRIC:
            return (rng.geometric(float(p["p"]), n) - 1).astype(float)
        if family == Family.UNIFORM:
            return rng.integers(0, int(p["K"]) + 1, n).astype(float)
        if family == Family.NEGBINOM:
            return rng.negative_binomial(float(p["r"]), float(p["p"]), n).astype(float)
        if family == Family.LATTICE:
            weights = np.asarray(p["weights"], dtype=float)
            k = rng.choice(len(weights), size=n, p=weights / weights.sum())
            return float(p.get("z0", 0.0)) + float(p.get("t", 1.0)) * k
        if family == Family.DEGENERATE:
            return np.full(n, float(p.get("at", 0.0)))
        if family == Family.NORMAL:
            return rng.normal(float(p.get("mean", 0.0)), float(p["sd"]), n)
        if family == Family.LAPLACE:
            return rng.laplace(float(p.get("loc", 0.0)), float(p["scale"]), n)
        if family == Family.EXPONENTIAL:
            return float(p.get("loc", 0.0)) + rng.exponential(1.0 / float(p["rate"]), n)
        raise PreconditionError(f"unknown family '{family}'")

    @staticmethod
    def observation_mixture(target: DistributionSpec, noise: DistributionSpec) -> Optional[SignedMixture]:
        """Law of Y = X + ε as a mixture, when both summands are mixtures"""
        mx, me = DistributionService.as_mixture(target), DistributionService.as_mixture(noise)
        if mx is None or me is None:
            return None
        return mx.convolve(me)

    @staticmethod
    def observation_cdf(target: DistributionSpec, noise: DistributionSpec) -> Optional[Callable]:
        """F_Y, when it is available in closed form"""
        mixture = DistributionService.observation_mixture(target, noise)
        if mixture is not None:
            return mixture.cdf
        if noise.is_lattice:
            lattice, other = noise, target
        elif target.is_lattice:
            lattice, other = target, noise
        else:
            return None
        inner = DistributionService.cdf_fn(other)
        locs, weights = DistributionService.lattice_atoms(lattice)

        def cdf(x):
            x = np.asarray(x, dtype=float)
            return np.tensordot(inner(x[..., None] - locs), weights, axes=([-1], [0]))

        return cdf

    @staticmethod
    def observation_pdf(target: DistributionSpec, noise: DistributionSpec) -> Optional[Callable]:
        if target.is_lattice and noise.is_lattice:
            return None
        if not target.is_lattice and not noise.is_lattice:
            mixture = DistributionService.observation_mixture(target, noise)
            return None if mixture is None else mixture.pdf
        lattice_spec, other = (noise, target) if noise.is_lattice else (target, noise)
        inner = DistributionService.pdf_fn(other)
        locs, weights = DistributionService.lattice_atoms(lattice_spec)

        def pdf(x):
            x = np.asarray(x, dtype=float)
            return np.tensordot(inner(x[..., None] - locs), weights, axes=([-1], [0]))

        return pdf
