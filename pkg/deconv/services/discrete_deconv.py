import logging
import math
from typing import Callable, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from deconv.core.config import settings
from deconv.core.exceptions import DivergenceError, PreconditionError, SingularCoefficientError
from deconv.models.noise import LatticeNoise, ProbeNoise, SupportGrid
from deconv.models.samples import EmpiricalSample
from deconv.models.sequences import DoubleSeq, RightLateralSeq, StepDF
from deconv.services.inverse_seq import InverseSeqService
from deconv.services.seq_core import SeqCoreService
from deconv.utils.numeric import ArrayLike, lattice_floor

logger = logging.getLogger(__name__)

RealFn = Callable[[ArrayLike], ArrayLike]


class RightLateralMode(BaseModel):
    """Q vanishes below xi0; the sum is finite"""

    model_config = ConfigDict(frozen=True)

    xi0: float


class MonotoneMode(BaseModel):
    """Q non-decreasing; accumulate until the terms settle"""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(default_factory=lambda: settings.MONOTONE_TOL, gt=0.0)
    max_terms: int = Field(default_factory=lambda: settings.MONOTONE_MAX_TERMS, gt=0)
    quiet_terms: int = Field(5, gt=0)
    window: int = Field(10, gt=1)
    rising: int = Field(3, gt=1)


PointwiseMode = Union[RightLateralMode, MonotoneMode]

PLUGIN_VARIANTS = ("fig1", "fig2", "fig3")

# block size for evaluating R along the monotone-mode stream
_BLOCK = 64


class DiscreteDeconvService:

    @staticmethod
    def forward_general(q: RightLateralSeq, p: DoubleSeq) -> RightLateralSeq:
        """r(l) = sum_z q(l - z) p(l, z) for l = 0..lmax"""
        table = p.table()
        qq = q.window(0, p.lmax).astype(np.complex128)
        r = np.array([np.dot(qq[ell::-1], table[ell, :ell + 1]) for ell in range(p.lmax + 1)])
        return RightLateralSeq(offset=0, coeffs=r)

    @staticmethod
    def deconv_general(r: RightLateralSeq, p: DoubleSeq) -> RightLateralSeq:
        """q on 𝕃 from r(l) = sum_z q(l - z) p(l, z)"""
        beta = InverseSeqService.beta(p, p.lmax)
        limit = p.leading_limit()
        lead = np.array([p(ell, 0) for ell in range(limit)], dtype=np.complex128)
        r_dd = r.window(0, limit - 1).astype(np.complex128) / lead
        q = np.array([np.dot(r_dd[ell::-1], beta.values[ell, :ell + 1]) for ell in range(limit)])
        return RightLateralSeq(offset=0, coeffs=q)

    @staticmethod
    def deconv_single(r: RightLateralSeq, u: RightLateralSeq) -> RightLateralSeq:
        """q = (r / u(0)) * γ{ü+}, on the index range of r"""
        u0 = u.at(0)
        if u.offset < 0 or u0 == 0:
            raise SingularCoefficientError("leading coefficient u(0) vanishes", index=0)
        if len(r) == 0:
            return r
        span = r.end - 1 - min(r.offset, 0)
        gamma = InverseSeqService.gamma(u, max(span, 0)).as_seq()
        q = SeqCoreService.conv(r.scaled(1.0 / u0), gamma)
        return SeqCoreService.truncate(q, r.end - 1)

    @staticmethod
    def partial_sums(R: RealFn, u: RightLateralSeq, xi: float, terms: int) -> np.ndarray:
        """S_T = sum_{z<=T} γ(z) R(xi - z), T = 0..terms-1"""
        gamma = InverseSeqService.gamma(u, terms - 1).values
        values = np.asarray(R(xi - np.arange(terms, dtype=float)), dtype=float)
        return np.cumsum(gamma * values)

    @staticmethod
    def deconv_df_pointwise(R: RealFn, u: RightLateralSeq, xi: float, mode: PointwiseMode = None) -> float:
        """u(0)^{-1} (R * Θ{γ{ü+}})(xi)

        In monotone mode the sum is cut once `quiet_terms` consecutive terms
        fall below `tol`, and DivergenceError is raised when the spread of the
        partial sums grows over `rising` consecutive windows. That diagnostic
        is heuristic: inverse sequences with a long transient, e.g. Poisson
        noise with large λ where |γ(z)| = λ^z / z! peaks near z = λ before
        decaying, can grow for many windows and be reported as divergent
        although the series converges. Raise `window` or `rising` (or use
        RightLateralMode when the target is bounded below) in that case.
        """
        mode = mode or MonotoneMode()
        u0 = u.at(0)
        if u.offset < 0 or u0 == 0:
            raise SingularCoefficientError("leading coefficient u(0) vanishes", index=0)
        u0 = complex(u0)

        if isinstance(mode, RightLateralMode):
            top = int(lattice_floor(xi - mode.xi0))
            if top < 0:
                return 0.0
            gamma = InverseSeqService.gamma(u, top).values
            values = np.asarray(R(xi - np.arange(top + 1, dtype=float)), dtype=float)
            return float(np.real(np.dot(gamma, values) / u0))

        stream = InverseSeqService.gamma_stream(u)
        total = 0j
        quiet = 0
        sums: List[float] = []
        deviations: List[float] = []
        z = 0
        while z < mode.max_terms:
            block = min(_BLOCK, mode.max_terms - z)
            values = np.asarray(R(xi - np.arange(z, z + block, dtype=float)), dtype=float)
            for value in values:
                term = next(stream) * value
                total += term
                sums.append(float(np.real(total / u0)))
                z += 1
                quiet = quiet + 1 if abs(term) < mode.tol else 0
                if quiet >= mode.quiet_terms:
                    return sums[-1]
                if len(sums) % mode.window == 0:
                    recent = np.asarray(sums[-mode.window:])
                    deviations.append(float(np.max(np.abs(recent - np.median(recent)))))
                    tail = deviations[-mode.rising:]
                    if len(tail) == mode.rising and all(a < b for a, b in zip(tail, tail[1:])):
                        logger.warning(f"oscillating partial sums at xi={xi} after {z} terms")
                        raise DivergenceError(
                            f"partial sums oscillate with growing amplitude at xi={xi} after {z} terms",
                            partial_sums=sums,
                        )
        raise DivergenceError(f"no convergence at xi={xi} within {mode.max_terms} terms", partial_sums=sums)

    @staticmethod
    def pmf_to_df(pmf: RightLateralSeq) -> np.ndarray:
        """Partial sums of a pmf over the grid points"""
        return np.cumsum(pmf.real())

    @staticmethod
    def cor1_pmf_deconv(grid: SupportGrid, eps_pmf_at: RealFn, z0: float, FY_atom_at: RealFn) -> RightLateralSeq:
        """F_X{ξ_l} from the atoms of F_Y and a left-bounded discrete error law"""
        lead = float(eps_pmf_at(z0))
        if lead <= 0:
            raise SingularCoefficientError(f"F_eps{{{z0}}} vanishes", index=0)
        xi = grid.points
        r = RightLateralSeq.from_values([float(FY_atom_at(z0 + x)) for x in xi])
        if grid.span is not None:
            u = RightLateralSeq.from_values([float(eps_pmf_at(z0 + grid.span * z)) for z in range(len(xi))])
            return DiscreteDeconvService.deconv_single(r, u)
        p = DoubleSeq(provider=lambda ell, z: eps_pmf_at(z0 + xi[ell] - xi[ell - z]), lmax=len(xi) - 1)
        return DiscreteDeconvService.deconv_general(r, p)

    @staticmethod
    def cor1_df(grid: SupportGrid, eps_pmf_at: RealFn, z0: float, FY_atom_at: RealFn, xi: ArrayLike) -> np.ndarray:
        """F_X(xi) = Θ{p_X}((xi - ξ0) / s) on an equidistant grid"""
        if grid.span is None:
            raise PreconditionError("the distribution-function form needs an equidistant grid")
        pmf = DiscreteDeconvService.cor1_pmf_deconv(grid, eps_pmf_at, z0, FY_atom_at)
        df = StepDF(seq=RightLateralSeq(offset=0, coeffs=pmf.real()), scale=grid.span)
        return np.real(SeqCoreService.theta_values(df, np.asarray(xi, dtype=float) - grid.xi0))

    @staticmethod
    def cor2_pmf_deconv(grid: SupportGrid, Feps_cdf: RealFn, z0: float, FY_cdf: RealFn) -> RightLateralSeq:
        """F_X{ξ_l} from F_Y read at probes ζ_l, for arbitrary left-bounded errors"""
        if float(Feps_cdf(z0)) != 0.0:
            raise PreconditionError(f"F_eps({z0}) must vanish")
        xi = grid.points
        zeta = grid.probe_points()
        for ell in range(len(xi)):
            upper = xi[ell + 1] if ell + 1 < len(xi) else math.inf
            if not (xi[ell] < zeta[ell] <= upper):
                raise PreconditionError(f"probe point {zeta[ell]} outside (ξ_l, ξ_l+1] at l={ell}", index=ell)
            if float(Feps_cdf(z0 + zeta[ell] - xi[ell])) <= 0:
                raise PreconditionError(f"F_eps vanishes at the probe for l={ell}", index=ell)
        r = RightLateralSeq.from_values([float(FY_cdf(z0 + zt)) for zt in zeta])
        offsets = zeta - xi
        if grid.span is not None and np.allclose(offsets, offsets[0], rtol=0.0, atol=1e-12):
            sigma = offsets[0]
            u = RightLateralSeq.from_values(
                [float(Feps_cdf(z0 + sigma + grid.span * z)) for z in range(len(xi))]
            )
            return DiscreteDeconvService.deconv_single(r, u)
        p = DoubleSeq(provider=lambda ell, z: Feps_cdf(z0 + zeta[ell] - xi[ell - z]), lmax=len(xi) - 1)
        return DiscreteDeconvService.deconv_general(r, p)

    @staticmethod
    def cor3_df_deconv(noise: LatticeNoise, FY: RealFn, xi: float, guard: PointwiseMode = None) -> float:
        """F_X(xi) = F_eps{z0}^{-1} sum_z γ(z) F_Y(z0 + xi - t z)"""
        guard = guard or MonotoneMode()
        if isinstance(guard, RightLateralMode):
            guard = RightLateralMode(xi0=guard.xi0 / noise.t)

        def R(x):
            return FY(noise.z0 + noise.t * np.asarray(x, dtype=float))

        return DiscreteDeconvService.deconv_df_pointwise(R, noise.pmf, xi / noise.t, guard)

    @staticmethod
    def plugin_estimator(
        sample: EmpiricalSample,
        noise: Union[LatticeNoise, ProbeNoise],
        grid: Sequence[float],
        variant: str = "fig1",
        xi0: float = 0.0,
    ) -> np.ndarray:
        """Unbiased step-function estimate of F_X on the grid from a blurred sample"""
        if sample.n == 0:
            raise PreconditionError("plug-in estimator needs a non-empty sample")
        if variant not in PLUGIN_VARIANTS:
            raise PreconditionError(f"unknown estimator variant '{variant}'")
        grid = np.asarray(grid, dtype=float)
        obs = sample.obs

        if variant in ("fig1", "fig3"):
            if not isinstance(noise, LatticeNoise):
                raise PreconditionError(f"variant {variant} needs lattice noise")
            args = (grid[None, :] + noise.z0 - obs[:, None]) / noise.t
            zmax = int(np.max(lattice_floor(args)))
            if zmax < 0:
                return np.zeros(len(grid))
            gamma = InverseSeqService.gamma_for_noise(noise, zmax).as_seq()
            steps = SeqCoreService.theta_values(StepDF(seq=gamma), args)
            return np.real(steps.sum(axis=0)) / (sample.n * noise.pmf0)

        if not isinstance(noise, ProbeNoise):
            raise PreconditionError("variant fig2 needs a probed continuous error law")
        s = noise.span
        jmax = int(np.max(lattice_floor(grid - xi0, s)))
        if jmax < 0:
            return np.zeros(len(grid))
        base = noise.z0 + xi0 + noise.sigma
        args = (base + s * np.arange(jmax + 1)[None, :] - obs[:, None]) / s
        zmax = max(int(np.max(lattice_floor(args))), 0)
        u = noise.u_sequence(zmax)
        lead = float(np.real(u.at(0)))
        if lead <= 0:
            raise SingularCoefficientError("F_eps(z0 + sigma) vanishes", index=0)
        gamma = InverseSeqService.gamma(u, zmax).as_seq()
        columns = np.real(SeqCoreService.theta_values(StepDF(seq=gamma), args).sum(axis=0))
        running = np.cumsum(columns) / (sample.n * lead)
        idx = lattice_floor(grid - xi0, s)
        return np.where(idx < 0, 0.0, running[np.clip(idx, 0, jmax)])

    @staticmethod
    def pool_estimates(estimates: Sequence[np.ndarray], sizes: Sequence[int]) -> np.ndarray:
        """Sample-size-weighted average of per-sample estimates"""
        sizes = np.asarray(sizes, dtype=float)
        stacked = np.vstack([np.asarray(e, dtype=float) for e in estimates])
        return sizes @ stacked / sizes.sum()
