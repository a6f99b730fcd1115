import logging
from typing import Callable, List, Sequence, Union

import numpy as np

from deconv.core.config import settings
from deconv.core.exceptions import PreconditionError
from deconv.models.measures import SignedMixture
from deconv.models.noise import LatticeNoise, NormalNoise
from deconv.models.samples import EmpiricalSample
from deconv.utils.numeric import ArrayLike

logger = logging.getLogger(__name__)


class CharFn:
    """Fourier-Stieltjes transform t -> ∫ e^{itx} μ(dx), vectorised over t"""

    def __init__(self, evaluator: Callable[[np.ndarray], np.ndarray]):
        self.evaluator = evaluator

    def __call__(self, t: ArrayLike):
        values = self.evaluator(np.atleast_1d(np.asarray(t, dtype=float)))
        return values if np.ndim(t) else complex(values[0])

    def __mul__(self, other: "CharFn") -> "CharFn":
        return CharFn(lambda t: self.evaluator(t) * other.evaluator(t))


class FourierOracleService:

    @staticmethod
    def cf_of(obj: Union[SignedMixture, LatticeNoise, NormalNoise, EmpiricalSample]) -> CharFn:
        if isinstance(obj, SignedMixture):
            coeffs, locs, variances = obj.coeffs, obj.locations, obj.variances

            def evaluate(t):
                phase = 1j * np.outer(t, locs) - 0.5 * np.outer(t ** 2, variances)
                return np.exp(phase) @ coeffs

            return CharFn(evaluate)
        if isinstance(obj, LatticeNoise):
            locs, weights = obj.locations, obj.weights
            return CharFn(lambda t: np.exp(1j * np.outer(t, locs)) @ weights)
        if isinstance(obj, NormalNoise):
            c, var = obj.c, obj.sigma ** 2
            return CharFn(lambda t: np.exp(1j * t * c - 0.5 * var * t ** 2))
        if isinstance(obj, EmpiricalSample):
            obs = obj.obs
            return CharFn(lambda t: np.exp(1j * np.outer(t, obs)).mean(axis=1))
        raise PreconditionError(f"no characteristic function for {type(obj).__name__}")

    @staticmethod
    def cf_deconv_closed(phi_eta: CharFn, phi_eps: CharFn, phi_y: CharFn, t: float, m: int) -> complex:
        """Φη ΦY sum_{l<=m} (1 - Φη Φε)^l, closed geometric form away from ΦηΦε = 0"""
        ee = complex(phi_eta(t)) * complex(phi_eps(t))
        if abs(ee) > settings.CF_ZERO_TOL:
            return complex(phi_y(t)) / complex(phi_eps(t)) * (1.0 - (1.0 - ee) ** (m + 1))
        return FourierOracleService.cf_deconv_direct(phi_eta, phi_eps, phi_y, t, m)

    @staticmethod
    def cf_deconv_direct(phi_eta: CharFn, phi_eps: CharFn, phi_y: CharFn, t: float, m: int) -> complex:
        eta = complex(phi_eta(t))
        ratio = 1.0 - eta * complex(phi_eps(t))
        return eta * complex(phi_y(t)) * sum(ratio ** ell for ell in range(m + 1))

    @staticmethod
    def convergence_region(phi_eta: CharFn, phi_eps: CharFn, tgrid: Sequence[float]) -> List[bool]:
        """|1 - Φη(t)Φε(t)| < 1; advisory only"""
        t = np.asarray(tgrid, dtype=float)
        return [bool(v) for v in np.abs(1.0 - phi_eta(t) * phi_eps(t)) < 1.0]
