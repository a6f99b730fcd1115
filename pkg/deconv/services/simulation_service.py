import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np

from deconv.core.config import settings
from deconv.core.exceptions import PreconditionError
from deconv.models.measures import DiracAt, SignedMixture
from deconv.models.noise import SupportGrid
from deconv.models.reports import ResultFrame, ResultRow
from deconv.models.samples import EmpiricalSample
from deconv.models.scenario import DistributionSpec, EstimatorName, Scenario
from deconv.models.sequences import RightLateralSeq, StepDF
from deconv.services.discrete_deconv import DiscreteDeconvService, MonotoneMode, RightLateralMode
from deconv.services.distribution_service import DistributionService
from deconv.services.neumann_deconv import NeumannDeconvService
from deconv.services.seq_core import SeqCoreService
from deconv.utils.numeric import lattice_floor

logger = logging.getLogger(__name__)

Estimator = Callable[[Optional[EmpiricalSample]], np.ndarray]


class SimulationService:
    """Sampling, estimator evaluation and Monte Carlo aggregation for scenarios"""

    @staticmethod
    def replication_rngs(seed: int, replication: int) -> Tuple[np.random.Generator, np.random.Generator]:
        """Independent target and noise streams for one replication"""
        root = np.random.SeedSequence(entropy=seed, spawn_key=(replication,))
        x_seq, e_seq = root.spawn(2)
        return np.random.Generator(np.random.PCG64(x_seq)), np.random.Generator(np.random.PCG64(e_seq))

    @staticmethod
    def sample(
        target: DistributionSpec, noise: DistributionSpec, n: int, seed: int, replication: int = 0
    ) -> EmpiricalSample:
        """Y = X + ε, deterministic given seed and replication"""
        rng_x, rng_e = SimulationService.replication_rngs(seed, replication)
        x = DistributionService.draw(target, n, rng_x)
        eps = DistributionService.draw(noise, n, rng_e)
        return EmpiricalSample(obs=x + eps)

    @staticmethod
    def eta_of(scenario: Scenario) -> SignedMixture:
        est = scenario.estimator
        if est.eta:
            return SignedMixture.from_terms((c, DiracAt(location=x)) for c, x in est.eta).merged()
        return NeumannDeconvService.default_eta(DistributionService.noise_model(scenario.noise))

    @staticmethod
    def _equidistant_support(target: DistributionSpec, grid: np.ndarray, probe_offset: float = None) -> SupportGrid:
        xi0, span = target.left_extremity, target.span
        size = max(int(lattice_floor(float(grid.max()) - xi0, span)), 0) + 1
        points = xi0 + span * np.arange(size)
        probes = None if probe_offset is None else points + probe_offset
        return SupportGrid.equidistant(xi0, span, size, probes=probes)

    @staticmethod
    def _step_values(pmf: RightLateralSeq, support: SupportGrid, grid: np.ndarray) -> np.ndarray:
        df = StepDF(seq=RightLateralSeq(offset=0, coeffs=pmf.real()), scale=support.span)
        return np.real(SeqCoreService.theta_values(df, grid - support.xi0))

    @staticmethod
    def sample_estimator(scenario: Scenario, grid: np.ndarray) -> Estimator:
        """Plug-in estimate of F_X on the grid from one blurred sample"""
        target, noise, est = scenario.target, scenario.noise, scenario.estimator

        if est.name in (EstimatorName.COR1, EstimatorName.COR3):
            lattice = DistributionService.lattice_noise(noise)
            variant = "fig1" if est.name == EstimatorName.COR1 else "fig3"
            return lambda sample: DiscreteDeconvService.plugin_estimator(sample, lattice, grid, variant)

        if est.name == EstimatorName.COR2:
            probe = DistributionService.probe_noise(noise, sigma=est.sigma, span=target.span)
            xi0 = target.left_extremity
            return lambda sample: DiscreteDeconvService.plugin_estimator(sample, probe, grid, "fig2", xi0=xi0)

        model = DistributionService.noise_model(noise)
        eta = SimulationService.eta_of(scenario)
        M = eta.convolve(NeumannDeconvService.neumann_sum(eta, model, est.m))
        logger.info(f"neumann mixture with {len(M)} components for m={est.m}")
        return lambda sample: np.atleast_1d(NeumannDeconvService.apply(M, sample, grid))

    @staticmethod
    def exact_curve(scenario: Scenario, grid: np.ndarray) -> np.ndarray:
        """The estimator evaluated at the exact law of Y instead of a sample"""
        target, noise, est = scenario.target, scenario.noise, scenario.estimator
        FY = DistributionService.observation_cdf(target, noise)

        if est.name == EstimatorName.COR1:
            support = SimulationService._equidistant_support(target, grid)
            lattice = DistributionService.lattice_noise(noise)
            law = DistributionService.observation_mixture(target, noise)
            return DiscreteDeconvService.cor1_df(support, lattice.atom, lattice.z0, law.atom_mass, grid)

        if est.name == EstimatorName.COR2:
            support = SimulationService._equidistant_support(target, grid, probe_offset=est.sigma)
            pmf = DiscreteDeconvService.cor2_pmf_deconv(
                support, DistributionService.cdf_fn(noise), noise.left_extremity, FY
            )
            return SimulationService._step_values(pmf, support, grid)

        if est.name == EstimatorName.COR3:
            lattice = DistributionService.lattice_noise(noise)
            x0 = target.left_extremity
            guard = RightLateralMode(xi0=x0) if math.isfinite(x0) else MonotoneMode()
            return np.array([DiscreteDeconvService.cor3_df_deconv(lattice, FY, float(x), guard) for x in grid])

        model = DistributionService.noise_model(noise)
        source = DistributionService.observation_mixture(target, noise)
        if source is None:
            source = FY
        if source is None:
            raise PreconditionError("no analytic law of Y for this target/noise pair")
        eta = SimulationService.eta_of(scenario)
        return np.atleast_1d(NeumannDeconvService.deconv_fn(eta, model, source, grid, est.m))

    @staticmethod
    def aggregate(columns: np.ndarray) -> Tuple[List[float], List[float]]:
        """Per grid point mean and sample sd with compensated summation"""
        count = columns.shape[0]
        means, sds = [], []
        for values in columns.T:
            mean = math.fsum(values) / count
            means.append(mean)
            if count > 1:
                sds.append(math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (count - 1)))
            else:
                sds.append(0.0)
        return means, sds

    @staticmethod
    def run_scenario(scenario: Scenario) -> ResultFrame:
        grid = scenario.grid.points()
        target, noise, est = scenario.target, scenario.noise, scenario.estimator
        logger.info(
            f"running scenario {scenario.name or '<unnamed>'}: {est.name.value} on {len(grid)} grid points, "
            f"n={scenario.n}, replications={scenario.replications}"
        )

        if est.source == "exact":
            if scenario.replications > 1:
                logger.info("exact evaluation is deterministic; replications collapse to one")
            curves = np.atleast_2d(SimulationService.exact_curve(scenario, grid))
        else:
            estimator = SimulationService.sample_estimator(scenario, grid)

            def replicate(r: int) -> np.ndarray:
                sample = SimulationService.sample(target, noise, scenario.n, scenario.seed, r)
                return np.asarray(estimator(sample), dtype=float)

            workers = max(1, min(settings.THREADS, scenario.replications))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                curves = np.vstack(list(pool.map(replicate, range(scenario.replications))))

        means, sds = SimulationService.aggregate(curves)
        fx_true = DistributionService.cdf_fn(target)(grid)
        FY = DistributionService.observation_cdf(target, noise)
        fy_true = None if FY is None else np.asarray(FY(grid), dtype=float)

        rows = [
            ResultRow(
                xi=float(x),
                fx_true=float(fx_true[i]),
                fy_true=None if fy_true is None else float(fy_true[i]),
                est_mean=means[i],
                est_sd=sds[i],
            )
            for i, x in enumerate(grid)
        ]
        return ResultFrame(
            scenario=scenario.name,
            estimator=est.name.value,
            replications=curves.shape[0],
            rows=rows,
            per_replication=curves.tolist() if est.keep_replications else None,
        )
