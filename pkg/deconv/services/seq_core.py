import itertools
import logging
from typing import Iterator, Tuple

import numpy as np

from deconv.core.config import settings
from deconv.core.exceptions import EnumerationSizeError, PreconditionError
from deconv.models.sequences import RightLateralSeq, StepDF
from deconv.utils.numeric import ArrayLike, binomial, binomial_matrix, lattice_floor

logger = logging.getLogger(__name__)


class SeqCoreService:
    """Algebra of right-lateral sequences and their step distribution functions"""

    @staticmethod
    def _exact_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        out = np.zeros(len(a) + len(b) - 1, dtype=object)
        for i, x in enumerate(a):
            for k, y in enumerate(b):
                out[i + k] += x * y
        return out

    @staticmethod
    def conv(a: RightLateralSeq, b: RightLateralSeq) -> RightLateralSeq:
        if len(a) == 0 or len(b) == 0:
            return RightLateralSeq(offset=a.offset + b.offset, coeffs=np.zeros(0, dtype=np.complex128))
        if a.is_exact and b.is_exact:
            coeffs = SeqCoreService._exact_convolve(a.coeffs, b.coeffs)
        else:
            coeffs = np.convolve(a.coeffs.astype(np.complex128), b.coeffs.astype(np.complex128))
        na, nb = a.norm1(), b.norm1()
        tail = a.tail_mass * nb + b.tail_mass * na + a.tail_mass * b.tail_mass
        return RightLateralSeq(offset=a.offset + b.offset, coeffs=coeffs, tail_mass=tail)

    @staticmethod
    def truncate(u: RightLateralSeq, zmax: int) -> RightLateralSeq:
        """Drop indices above zmax"""
        keep = max(zmax - u.offset + 1, 0)
        return RightLateralSeq(offset=u.offset, coeffs=u.coeffs[:keep], tail_mass=u.tail_mass)

    @staticmethod
    def conv_power(u: RightLateralSeq, j: int, zmax: int) -> RightLateralSeq:
        if j < 0:
            raise PreconditionError(f"power index must be non-negative, got {j}")
        if zmax < 0:
            raise PreconditionError(f"zmax must be non-negative, got {zmax}")
        result = RightLateralSeq.dirac(0, exact=u.is_exact)
        for _ in range(j):
            result = SeqCoreService.conv(result, u)
            if u.offset >= 0:
                result = SeqCoreService.truncate(result, zmax)
        return SeqCoreService.truncate(result, zmax)

    @staticmethod
    def compositions(ell: int, j: int) -> Iterator[Tuple[int, ...]]:
        """Ordered tuples of j positive integers summing to ell"""
        if j <= 0 or ell < j:
            return
        for cuts in itertools.combinations(range(1, ell), j - 1):
            bounds = (0,) + cuts + (ell,)
            yield tuple(bounds[i + 1] - bounds[i] for i in range(j))

    @staticmethod
    def conv_power_oracle(u: RightLateralSeq, j: int, ell: int) -> complex:
        """u^{*j}(ell) as a sum of products over compositions of ell"""
        if ell > settings.COMPOSITION_CAP:
            raise EnumerationSizeError(
                f"composition enumeration capped at l <= {settings.COMPOSITION_CAP}, got {ell}"
            )
        if j < 1:
            raise PreconditionError(f"number of parts must be positive, got {j}")
        if any(u.at(z) != 0 for z in range(u.offset, 1)):
            raise PreconditionError("composition oracle requires u(z) = 0 for z <= 0")
        total = 0j
        for parts in SeqCoreService.compositions(ell, j):
            term = 1 + 0j
            for z in parts:
                term *= u.at(z)
            total += term
        return total

    @staticmethod
    def binom_transform(p: RightLateralSeq) -> RightLateralSeq:
        if p.offset != 0:
            raise PreconditionError(f"binomial transform needs offset 0, got {p.offset}")
        size = len(p)
        if p.is_exact:
            out = np.zeros(size, dtype=object)
            for ell in range(size):
                out[ell] = sum(binomial(ell, k, exact=True) * (-1) ** k * p.coeffs[k] for k in range(ell + 1))
            return RightLateralSeq(offset=0, coeffs=out)
        signs = np.where(np.arange(size) % 2 == 0, 1.0, -1.0)
        matrix = binomial_matrix(size) * signs[None, :]
        return RightLateralSeq(offset=0, coeffs=matrix @ p.coeffs, tail_mass=p.tail_mass)

    @staticmethod
    def theta_eval(df: StepDF, xi: float) -> complex:
        k = int(lattice_floor(xi, df.scale))
        seq = df.seq
        if k < seq.offset:
            return 0j
        return complex(np.sum(seq.coeffs[:k - seq.offset + 1]))

    @staticmethod
    def theta_values(df: StepDF, xs: ArrayLike) -> np.ndarray:
        """Vectorised theta_eval over an array of arguments"""
        seq = df.seq
        xs = np.asarray(xs, dtype=float)
        if len(seq) == 0:
            return np.zeros(xs.shape, dtype=np.complex128)
        partial = np.cumsum(seq.coeffs.astype(np.complex128))
        idx = lattice_floor(xs, df.scale) - seq.offset
        out = partial[np.clip(idx, 0, len(partial) - 1)]
        return np.where(idx < 0, 0j, out)
