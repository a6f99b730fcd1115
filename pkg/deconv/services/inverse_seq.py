import logging
import math
from collections import deque
from fractions import Fraction
from typing import Dict, Iterator

import numpy as np
from scipy.special import gammaln

from deconv.core.exceptions import PreconditionError, SingularCoefficientError
from deconv.models.noise import LatticeNoise
from deconv.models.sequences import DoubleSeq, InverseTable, RightLateralSeq
from deconv.utils.numeric import binomial

logger = logging.getLogger(__name__)

CLOSED_FORM_FAMILIES = ("bernoulli", "geometric", "poisson", "uniform")


class InverseSeqService:
    """Inverse sequences γ (single index) and β (double index)"""

    @staticmethod
    def _leading(u: RightLateralSeq) -> complex:
        if u.offset < 0:
            raise PreconditionError(f"sequence must start at index >= 0, got offset {u.offset}")
        u0 = u.at(0)
        if u0 == 0:
            raise SingularCoefficientError("leading coefficient u(0) vanishes", index=0)
        return u0

    @staticmethod
    def u_plus(u: RightLateralSeq) -> RightLateralSeq:
        """δ0 - u / u(0)"""
        u0 = InverseSeqService._leading(u)
        values = u.window(0, max(u.end - 1, 0))
        if u.is_exact:
            out = np.array([-Fraction(v) / Fraction(u0) for v in values], dtype=object)
            out[0] = 0
        else:
            out = -values.astype(np.complex128) / u0
            out[0] = 0
        return RightLateralSeq(offset=0, coeffs=out, tail_mass=u.tail_mass / abs(u0))

    @staticmethod
    def gamma_stream(u: RightLateralSeq) -> Iterator[complex]:
        """γ(0), γ(1), ... generated lazily from the finite support of u"""
        u0 = complex(InverseSeqService._leading(u))
        tail = u.window(1, max(u.end - 1, 1)).astype(np.complex128)[::-1]
        width = len(tail)
        history = deque([1 + 0j], maxlen=width)
        yield 1 + 0j
        while True:
            past = np.fromiter(history, dtype=np.complex128, count=len(history))
            value = complex(-np.dot(tail[width - len(past):], past) / u0)
            history.append(value)
            yield value

    @staticmethod
    def gamma(u: RightLateralSeq, zmax: int) -> InverseTable:
        """γ(0..zmax) by back substitution of u(0)^{-1}(u * γ) = δ0"""
        if zmax < 0:
            raise PreconditionError(f"zmax must be non-negative, got {zmax}")
        u0 = complex(InverseSeqService._leading(u))
        uu = u.window(0, zmax).astype(np.complex128)
        width = min(u.end - 1, zmax)
        values = np.zeros(zmax + 1, dtype=np.complex128)
        values[0] = 1.0
        for z in range(1, zmax + 1):
            lo = max(0, z - width)
            values[z] = -np.dot(uu[z - lo:0:-1], values[lo:z]) / u0
        return InverseTable(values=values, kind="gamma")

    @staticmethod
    def gamma_closed_form(family: str, params: Dict[str, float], zmax: int) -> InverseTable:
        z = np.arange(zmax + 1)
        if family == "bernoulli":
            p = float(params["p"])
            values = np.power(-p / (1.0 - p), z).astype(np.complex128)
        elif family == "geometric":
            p = float(params["p"])
            values = np.zeros(zmax + 1, dtype=np.complex128)
            values[0] = 1.0
            if zmax >= 1:
                values[1] = -(1.0 - p)
        elif family == "poisson":
            lam = float(params["lam"])
            signs = np.where(z % 2 == 0, 1.0, -1.0)
            values = (signs * np.exp(z * math.log(lam) - gammaln(z + 1))).astype(np.complex128)
        elif family == "uniform":
            # (1 - x) / (1 - x^{K+1}): period K + 1 pattern 1, -1, 0, ..., 0; K = 0 is δ0
            period = int(params["K"]) + 1
            if period == 1:
                values = np.where(z == 0, 1.0, 0.0).astype(np.complex128)
            else:
                phase = z % period
                values = np.where(phase == 0, 1.0, np.where(phase == 1, -1.0, 0.0)).astype(np.complex128)
        else:
            raise PreconditionError(f"no closed form for family '{family}'")
        return InverseTable(values=values, kind="gamma")

    @staticmethod
    def gamma_for_noise(noise: LatticeNoise, zmax: int) -> InverseTable:
        if noise.family in CLOSED_FORM_FAMILIES:
            return InverseSeqService.gamma_closed_form(noise.family, noise.params, zmax)
        return InverseSeqService.gamma(noise.pmf, zmax)

    @staticmethod
    def _power_tables(base: np.ndarray, jmax: int) -> Iterator[np.ndarray]:
        """Non-commuting powers P_j(l, z) = sum_{z1} base(l, z1) P_{j-1}(l - z1, z - z1)"""
        size = base.shape[0]
        current = np.zeros_like(base)
        current[:, 0] = 1.0
        yield current
        for _ in range(jmax):
            nxt = np.zeros_like(base)
            for z1 in range(size):
                column = base[z1:, z1]
                if not np.any(column):
                    continue
                nxt[z1:, z1:] += column[:, None] * current[:size - z1, :size - z1]
            current = nxt
            yield current

    @staticmethod
    def _normalized_tables(p: DoubleSeq, lmax: int):
        """(p / p(l, 0), δ0 - p / p(l, 0)) on 𝕃, zero rows outside"""
        if lmax > p.lmax:
            raise PreconditionError(f"requested l={lmax} beyond the sequence cap {p.lmax}")
        bounded = DoubleSeq(provider=p.provider, lmax=lmax, l0=p.l0)
        table = bounded.table()
        limit = lmax + 1 if p.l0 is None else min(p.l0, lmax + 1)
        for ell in range(limit):
            if table[ell, 0] == 0:
                logger.error(f"singular leading coefficient at l={ell}")
                raise SingularCoefficientError(f"p({ell}, 0) vanishes inside the requested range", index=ell)
        scaled = np.zeros_like(table)
        scaled[:limit] = table[:limit] / table[:limit, :1]
        plus = -scaled.copy()
        plus[:limit, 0] = 0.0
        return scaled, plus, limit

    @staticmethod
    def double_power(p: DoubleSeq, j: int, lmax: int) -> np.ndarray:
        _, plus, _ = InverseSeqService._normalized_tables(p, lmax)
        for k, table in enumerate(InverseSeqService._power_tables(plus, j)):
            if k == j:
                return table
        raise PreconditionError(f"power index must be non-negative, got {j}")

    @staticmethod
    def beta(p: DoubleSeq, lmax: int) -> InverseTable:
        """β(l, z) = sum_{j<=z} p̈+^{*j}(l, z) as a dense triangular table"""
        _, plus, limit = InverseSeqService._normalized_tables(p, lmax)
        values = np.zeros_like(plus)
        for j, table in enumerate(InverseSeqService._power_tables(plus, lmax)):
            # cancelling: P_j vanishes for z < j
            if j > 0 and not np.any(table[:, j:]):
                break
            values += table
        values[limit:] = 0.0
        return InverseTable(values=values, kind="beta")

    @staticmethod
    def alpha(p: DoubleSeq, ell: int, z: int, x: float) -> complex:
        """Direct partial sum sum_{j=0}^{floor(x)} p̈+^{*j}(l, z)"""
        if x < 0:
            return 0j
        _, plus, _ = InverseSeqService._normalized_tables(p, ell)
        total = 0j
        for table in InverseSeqService._power_tables(plus, int(math.floor(x))):
            total += table[ell, z] if 0 <= z <= ell else 0.0
        return total

    @staticmethod
    def alpha_binomial_check(p: DoubleSeq, ell: int, z: int, x: float) -> complex:
        """α through sum_k binom(floor(x)+1, k+1)(-1)^k p̈^{*k}(l, z)"""
        if x < 0:
            return 0j
        steps = int(math.floor(x))
        scaled, _, _ = InverseSeqService._normalized_tables(p, ell)
        total = 0j
        for k, table in enumerate(InverseSeqService._power_tables(scaled, steps)):
            value = table[ell, z] if 0 <= z <= ell else 0.0
            total += binomial(steps + 1, k + 1) * (-1) ** k * value
        return total
