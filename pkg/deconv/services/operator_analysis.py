import logging

import numpy as np

from deconv.core.exceptions import PreconditionError
from deconv.models.measures import SignedMixture
from deconv.models.noise import LatticeNoise, NoiseModel
from deconv.models.reports import JordanCase, TVReport
from deconv.services.neumann_deconv import NeumannDeconvService

logger = logging.getLogger(__name__)


class OperatorAnalysisService:
    """Total variation of π_{η*μ_ε} and the sufficient invertibility condition"""

    @staticmethod
    def atom_overlap(eta: SignedMixture, noise: NoiseModel) -> float:
        """(F_η * F_ε){0} = sum_z F_ε{z} F_η{-z}"""
        if not isinstance(noise, LatticeNoise):
            return 0.0
        atomic = eta.atomic_mask
        if not np.any(atomic):
            return 0.0
        return float(np.dot(eta.coeffs[atomic], noise.atom(-eta.locations[atomic])))

    @staticmethod
    def tv_of_pi(eta: SignedMixture, noise: NoiseModel) -> TVReport:
        if not eta.is_nonnegative():
            raise PreconditionError("η must be a non-negative measure")
        mass = eta.total_mass()
        overlap = OperatorAnalysisService.atom_overlap(eta, noise)
        tv = 1.0 + mass - 2.0 * overlap if overlap < 1.0 else mass - 1.0
        if not isinstance(noise, LatticeNoise) or not eta.is_atomic:
            case = JordanCase.CONTINUOUS_LOWER_BOUND
        elif overlap < 1.0:
            case = JordanCase.SPLIT
        else:
            case = JordanCase.NONPOSITIVE
        invertible = mass < 2.0 * min(overlap, 1.0)
        logger.debug(f"tv={tv} overlap={overlap} case={case.value}")
        return TVReport(
            tv=max(tv, 0.0),
            atom_overlap=overlap,
            eta_mass=mass,
            invertible_sufficient=invertible,
            jordan_case=case,
        )

    @staticmethod
    def invertibility_check(eta: SignedMixture, noise: NoiseModel) -> bool:
        """η(R) < 2 min{(F_η * F_ε){0}, 1}"""
        return OperatorAnalysisService.tv_of_pi(eta, noise).invertible_sufficient

    @staticmethod
    def pi_measure(eta: SignedMixture, noise: NoiseModel) -> SignedMixture:
        return NeumannDeconvService.pi_of(eta.convolve(NeumannDeconvService.noise_measure(noise)))

    @staticmethod
    def brute_force_tv(eta: SignedMixture, noise: NoiseModel) -> float:
        """sum |weights| of the explicitly merged atomic π_{η*μ_ε}"""
        pi = OperatorAnalysisService.pi_measure(eta, noise)
        if not pi.is_atomic:
            raise PreconditionError("brute-force total variation needs atomic measures")
        return pi.coeff_norm()

    @staticmethod
    def pi_power_tv(eta: SignedMixture, noise: NoiseModel, ell: int) -> float:
        """||π^{*l}||_TV, the size of the l-th Neumann increment"""
        pi = OperatorAnalysisService.pi_measure(eta, noise)
        if not pi.is_atomic:
            raise PreconditionError("power total variation needs atomic measures")
        return pi.power(ell).coeff_norm()
