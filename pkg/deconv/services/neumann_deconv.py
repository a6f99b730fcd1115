import logging
import math
from typing import Callable, List, Optional, Union

import numpy as np
from mpmath import mp, mpf
from numpy.polynomial.hermite_e import hermegauss
from scipy.special import comb, ndtr

from deconv.core.config import settings
from deconv.core.exceptions import NumericRangeError, PreconditionError
from deconv.models.measures import SignedMixture
from deconv.models.noise import LatticeNoise, NoiseModel, NormalNoise
from deconv.models.samples import EmpiricalSample
from deconv.models.sequences import RightLateralSeq
from deconv.services.inverse_seq import InverseSeqService
from deconv.services.seq_core import SeqCoreService
from deconv.utils.numeric import ArrayLike, lattice_floor, neumann_weights

logger = logging.getLogger(__name__)

CdfSource = Union[SignedMixture, EmpiricalSample, Callable[[ArrayLike], ArrayLike]]


class NeumannDeconvService:
    """Neumann partial sums Π{η}(·, m) and the deconvolution function 𝔉{η}(·, m)"""

    @staticmethod
    def _check_m(m: int) -> None:
        if m < 0 or m > settings.MAX_M:
            raise NumericRangeError(f"truncation index m={m} outside [0, {settings.MAX_M}]")

    @staticmethod
    def noise_measure(noise: NoiseModel) -> SignedMixture:
        if isinstance(noise, NormalNoise):
            return SignedMixture.normal(noise.c, noise.sigma ** 2)
        return SignedMixture.atoms(noise.locations, noise.weights).merged()

    @staticmethod
    def default_eta(noise: NoiseModel) -> SignedMixture:
        """δ0 for normal noise, λ_{z0} δ_{-z0} for lattice noise"""
        if isinstance(noise, NormalNoise):
            return SignedMixture.dirac(0.0)
        return SignedMixture.dirac(-noise.z0, coeff=noise.lam)

    @staticmethod
    def pi_of(mu: SignedMixture) -> SignedMixture:
        """π_μ = δ0 - μ"""
        return SignedMixture.dirac(0.0) - mu

    @staticmethod
    def _lattice_shifts(eta: SignedMixture, noise: LatticeNoise) -> Optional[np.ndarray]:
        """Integer lattice offsets (h + z0) / t of η's atoms, or None when off the lattice"""
        if not eta.is_atomic or len(eta) == 0:
            return None
        q = (eta.locations + noise.z0) / noise.t
        k = np.rint(q)
        if np.any(np.abs(q - k) > settings.ATOM_TOL * np.maximum(1.0, np.abs(q))):
            return None
        return k.astype(np.int64)

    @staticmethod
    def _lattice_sum(eta: SignedMixture, noise: LatticeNoise, shifts: np.ndarray, m: int) -> SignedMixture:
        """Horner recursion P_j = δ0 + π * P_{j-1} on lattice sequences"""
        lo = min(int(shifts.min()), 0)
        hi = int(shifts.max()) + len(noise.pmf) - 1
        nu = np.zeros(hi - lo + 1)
        for c, k in zip(eta.coeffs, shifts):
            nu[k - lo:k - lo + len(noise.pmf)] += c * noise.weights
        pi = -nu
        pi[-lo] += 1.0
        pi_seq = RightLateralSeq(offset=lo, coeffs=pi)
        one = RightLateralSeq.dirac(0)
        total = one
        for _ in range(m):
            step = SeqCoreService.conv(pi_seq, total)
            lo_idx = min(step.offset, 0)
            values = step.window(lo_idx, step.end - 1)
            values[-lo_idx] += 1.0
            total = RightLateralSeq(offset=lo_idx, coeffs=values)
        index = total.offset + np.arange(len(total))
        return SignedMixture.atoms(noise.t * index, np.real(total.coeffs)).merged()

    @staticmethod
    def neumann_sum(eta: SignedMixture, noise: NoiseModel, m: int) -> SignedMixture:
        """Π{η}(·, m) = sum_{l<=m} π_{η*μ_ε}^{*l}"""
        NeumannDeconvService._check_m(m)
        if m == 0:
            return SignedMixture.dirac(0.0)

        if isinstance(noise, LatticeNoise):
            shifts = NeumannDeconvService._lattice_shifts(eta, noise)
            if shifts is not None:
                return NeumannDeconvService._lattice_sum(eta, noise, shifts, m)

        nu = eta.convolve(NeumannDeconvService.noise_measure(noise))
        if isinstance(noise, NormalNoise):
            weights = neumann_weights(m)
            parts: List[SignedMixture] = []
            if len(nu) == 1:
                c, x, v = float(nu.coeffs[0]), float(nu.locations[0]), float(nu.variances[0])
                k = np.arange(m + 1)
                return SignedMixture(coeffs=weights * c ** k, locations=k * x, variances=k * v).merged()
            power = SignedMixture.dirac(0.0)
            for k in range(m + 1):
                parts.append(power.scaled(weights[k]))
                power = power.convolve(nu)
            merged = parts[0]
            for part in parts[1:]:
                merged = merged + part
            return merged

        pi = NeumannDeconvService.pi_of(nu)
        one = SignedMixture.dirac(0.0)
        total = one
        for _ in range(m):
            total = one + pi.convolve(total)
        return total

    @staticmethod
    def contiguity_coeffs(nu0: float, m: int) -> np.ndarray:
        """a_{m,l} = ν0^l sum_{n=0}^{m-l} binom(n+l, l)(1-ν0)^n, l = 0..m"""
        if not (0.0 < nu0 <= 1.0):
            raise PreconditionError(f"ν0 must lie in (0, 1], got {nu0}")
        out = np.zeros(m + 1)
        for ell in range(m + 1):
            n = np.arange(m - ell + 1)
            out[ell] = nu0 ** ell * float(np.sum(comb(n + ell, ell) * (1.0 - nu0) ** n))
        return out

    @staticmethod
    def contiguity_mass(noise: LatticeNoise, a: float, m: int) -> float:
        """Π{δ_{-z0}}((-inf, a], m) through sum_l a_{m,l} (δ0 - λμ_{ε-z0})^{*l}"""
        top = int(lattice_floor(a, noise.t))
        if top < 0:
            return 0.0
        coeffs = NeumannDeconvService.contiguity_coeffs(noise.pmf0, m)
        u_plus = InverseSeqService.u_plus(noise.pmf)
        total = 0.0
        for ell in range(min(m, top) + 1):
            power = SeqCoreService.conv_power(u_plus, ell, top)
            total += coeffs[ell] * float(np.real(np.sum(power.coeffs)))
        return total

    # evaluation of sum_c c * E F(ξ - Z) over mixture components

    @staticmethod
    def _hp_normal_sum(coeffs, means, sds, xi: np.ndarray, density: bool = False) -> np.ndarray:
        out = np.zeros(len(xi))
        with mp.workdps(settings.MP_DPS):
            terms = [(mpf(float(c)), mpf(float(mu)), mpf(float(sd))) for c, mu, sd in zip(coeffs, means, sds)]
            for g, x in enumerate(xi):
                x = mpf(float(x))
                if density:
                    out[g] = float(mp.fsum(c * mp.npdf(x, mu, sd) for c, mu, sd in terms))
                else:
                    out[g] = float(mp.fsum(c * mp.ncdf(x, mu, sd) for c, mu, sd in terms))
        return out

    @staticmethod
    def _mixture_eval(mixture: SignedMixture, xi: np.ndarray, density: bool) -> np.ndarray:
        cont = ~mixture.atomic_mask
        weight = float(np.sum(np.abs(mixture.coeffs[cont])))
        if weight <= settings.HP_WEIGHT:
            return mixture.pdf(xi) if density else mixture.cdf(xi)
        logger.info(f"high-precision evaluation, coefficient weight {weight:.3g}")
        out = NeumannDeconvService._hp_normal_sum(
            mixture.coeffs[cont], mixture.locations[cont], np.sqrt(mixture.variances[cont]), xi, density
        )
        if not density and np.any(~cont):
            out += SignedMixture(
                coeffs=mixture.coeffs[~cont], locations=mixture.locations[~cont], variances=mixture.variances[~cont]
            ).cdf(xi)
        return out

    @staticmethod
    def _sample_eval(M: SignedMixture, sample: EmpiricalSample, xi: np.ndarray) -> np.ndarray:
        atomic = M.atomic_mask
        out = np.zeros(len(xi))
        if np.any(atomic):
            shifts = xi[:, None] - M.locations[atomic][None, :]
            out += sample.edf(shifts) @ M.coeffs[atomic]
        if np.any(~atomic):
            coeffs, means = M.coeffs[~atomic], M.locations[~atomic]
            sds = np.sqrt(M.variances[~atomic])
            if float(np.sum(np.abs(coeffs))) > settings.HP_WEIGHT:
                n = sample.n
                out += NeumannDeconvService._hp_normal_sum(
                    np.repeat(coeffs / n, n), np.add.outer(means, sample.obs).ravel(), np.repeat(sds, n), xi
                )
            else:
                for c, mu, sd in zip(coeffs, means, sds):
                    z = (xi[:, None] - mu - sample.obs[None, :]) / sd
                    out += c * ndtr(z).mean(axis=1)
        return out

    @staticmethod
    def _callable_eval(M: SignedMixture, fn: Callable, xi: np.ndarray) -> np.ndarray:
        atomic = M.atomic_mask
        out = np.zeros(len(xi))
        if np.any(atomic):
            values = np.asarray(fn(xi[:, None] - M.locations[atomic][None, :]), dtype=float)
            out += values @ M.coeffs[atomic]
        if np.any(~atomic):
            nodes, weights = hermegauss(settings.GH_NODES)
            weights = weights / math.sqrt(2.0 * math.pi)
            for c, mu, var in zip(M.coeffs[~atomic], M.locations[~atomic], M.variances[~atomic]):
                args = xi[:, None] - mu - math.sqrt(var) * nodes[None, :]
                out += c * (np.asarray(fn(args), dtype=float) @ weights)
        return out

    @staticmethod
    def apply(M: SignedMixture, source: CdfSource, xi: ArrayLike, density: bool = False) -> np.ndarray:
        """sum over components of coeff * E source(xi - Z)"""
        xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
        if isinstance(source, SignedMixture):
            conv = M.convolve(source)
            if density and np.any(conv.atomic_mask):
                raise PreconditionError("the observation law has atoms and no density")
            out = NeumannDeconvService._mixture_eval(conv, xi_arr, density)
        elif isinstance(source, EmpiricalSample):
            if density:
                raise PreconditionError("densities cannot be estimated from a sample")
            out = NeumannDeconvService._sample_eval(M, source, xi_arr)
        elif callable(source):
            out = NeumannDeconvService._callable_eval(M, source, xi_arr)
        else:
            raise PreconditionError(f"unsupported observation law {type(source).__name__}")
        return out if np.ndim(xi) else out[0]

    @staticmethod
    def deconv_fn(eta: SignedMixture, noise: NoiseModel, FY: CdfSource, xi: ArrayLike, m: int):
        """𝔉{η}(xi, m) = (F_η * F_Y * F_{Π{η}(·, m)})(xi)"""
        M = eta.convolve(NeumannDeconvService.neumann_sum(eta, noise, m))
        return NeumannDeconvService.apply(M, FY, xi)

    @staticmethod
    def picard_iterates(eta: SignedMixture, noise: NoiseModel, FY: CdfSource, xi: ArrayLike, m: int) -> np.ndarray:
        """𝔉{η}(xi, j) for j = 0..m; rows follow j"""
        NeumannDeconvService._check_m(m)
        nu = eta.convolve(NeumannDeconvService.noise_measure(noise))
        pi = NeumannDeconvService.pi_of(nu)
        power = eta
        rows = []
        running = np.zeros(np.shape(np.atleast_1d(xi)))
        for _ in range(m + 1):
            running = running + np.atleast_1d(NeumannDeconvService.apply(power, FY, xi))
            rows.append(running.copy())
            power = power.convolve(pi)
        return np.vstack(rows)

    @staticmethod
    def deconv_density(eta: SignedMixture, noise: NoiseModel, fY, xi: ArrayLike, m: int):
        """𝔣{η}(xi, m): the same mixture applied to the density of Y"""
        if fY is None:
            raise PreconditionError("a density of Y is required")
        M = eta.convolve(NeumannDeconvService.neumann_sum(eta, noise, m))
        return NeumannDeconvService.apply(M, fY, xi, density=True)

    @staticmethod
    def finite_rep_check(noise: LatticeNoise, xi: float, xi0: float) -> int:
        """m0 = floor((xi - xi0) / t), clipped at 0"""
        return max(0, int(lattice_floor(xi - xi0, noise.t)))
