# deconv/models/scenario.py
import math
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from deconv.core.config import settings


class Family(str, Enum):
    POISSON = "poisson"
    BERNOULLI = "bernoulli"
    GEOMETRIC = "geometric"
    UNIFORM = "uniform"
    NEGBINOM = "negbinom"
    LATTICE = "lattice"
    DEGENERATE = "degenerate"
    NORMAL = "normal"
    LAPLACE = "laplace"
    EXPONENTIAL = "exponential"


LATTICE_FAMILIES = {
    Family.POISSON, Family.BERNOULLI, Family.GEOMETRIC, Family.UNIFORM,
    Family.NEGBINOM, Family.LATTICE, Family.DEGENERATE,
}

# required parameters and their admissible ranges
PARAMETERS: Dict[Family, Dict[str, Tuple[float, float]]] = {
    Family.POISSON: {"lam": (0.0, math.inf)},
    Family.BERNOULLI: {"p": (0.0, 1.0)},
    Family.GEOMETRIC: {"p": (0.0, 1.0)},
    Family.UNIFORM: {"K": (0.0, math.inf)},
    Family.NEGBINOM: {"r": (0.0, math.inf), "p": (0.0, 1.0)},
    Family.LATTICE: {},
    Family.DEGENERATE: {},
    Family.NORMAL: {"sd": (0.0, math.inf)},
    Family.LAPLACE: {"scale": (0.0, math.inf)},
    Family.EXPONENTIAL: {"rate": (0.0, math.inf)},
}


class DistributionSpec(BaseModel):
    """A distribution family with its parameters"""

    model_config = ConfigDict(frozen=True)

    family: Family
    params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_params(self):
        for name, (lo, hi) in PARAMETERS[self.family].items():
            if name not in self.params:
                raise ValueError(f"{self.family.value} needs parameter '{name}'")
            value = float(self.params[name])
            if not (lo <= value <= hi) or (value == lo and name not in ("p", "K")):
                raise ValueError(f"{self.family.value} parameter {name}={value} outside ({lo}, {hi}]")
        if self.family == Family.UNIFORM and float(self.params["K"]) != int(self.params["K"]):
            raise ValueError("uniform parameter K must be an integer")
        if self.family in (Family.GEOMETRIC, Family.NEGBINOM) and float(self.params["p"]) == 0.0:
            raise ValueError(f"{self.family.value} parameter p must be positive")
        if self.family == Family.LATTICE:
            weights = np.asarray(self.params.get("weights", []), dtype=float)
            if len(weights) == 0 or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
                raise ValueError("lattice weights must be non-negative and sum to 1")
            if float(self.params.get("t", 1.0)) <= 0:
                raise ValueError("lattice span t must be positive")
        return self

    @property
    def is_lattice(self) -> bool:
        return self.family in LATTICE_FAMILIES

    @property
    def span(self) -> Optional[float]:
        if not self.is_lattice:
            return None
        return float(self.params.get("t", 1.0)) if self.family == Family.LATTICE else 1.0

    @property
    def left_extremity(self) -> float:
        if self.family == Family.LATTICE:
            return float(self.params.get("z0", 0.0))
        if self.family == Family.DEGENERATE:
            return float(self.params.get("at", 0.0))
        if self.family == Family.EXPONENTIAL:
            return float(self.params.get("loc", 0.0))
        if self.is_lattice:
            return 0.0
        return -math.inf


class EstimatorName(str, Enum):
    COR1 = "cor1"
    COR2 = "cor2"
    COR3 = "cor3"
    NEUMANN = "neumann"


class EstimatorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: EstimatorName
    m: Optional[int] = Field(None, ge=0)
    eta: Optional[List[Tuple[float, float]]] = None  # (coeff, location) atoms
    source: Literal["sample", "exact"] = "sample"
    sigma: float = Field(1.0, gt=0.0)
    keep_replications: bool = False


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    min: float
    max: float
    step: float = Field(..., gt=0.0)

    @model_validator(mode="after")
    def check_order(self):
        if self.max < self.min:
            raise ValueError(f"grid max {self.max} below min {self.min}")
        return self

    def points(self) -> np.ndarray:
        count = int(math.floor((self.max - self.min) / self.step + 1e-9)) + 1
        return self.min + self.step * np.arange(count)


class Scenario(BaseModel):
    """A reproducible simulation: target, noise, estimator, sampling design"""

    model_config = ConfigDict(frozen=True)

    name: Optional[str] = None
    target: DistributionSpec
    noise: DistributionSpec
    estimator: EstimatorSpec
    n: int = Field(..., ge=1)
    replications: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    grid: GridSpec

    @field_validator("seed", mode="before")
    @classmethod
    def coerce_seed(cls, v):
        return int(v)

    @model_validator(mode="after")
    def check_compatibility(self):
        target, noise, est = self.target, self.noise, self.estimator
        if noise.family == Family.BERNOULLI and float(noise.params["p"]) >= 1.0:
            raise ValueError("noise needs positive mass at its left extremity (Bernoulli p < 1)")
        if est.name == EstimatorName.COR1:
            if not (target.is_lattice and noise.is_lattice):
                raise ValueError("cor1 needs a lattice target and lattice noise")
            if not math.isclose(target.span, noise.span):
                raise ValueError(f"cor1 needs equal lattice spans, got {target.span} and {noise.span}")
        elif est.name == EstimatorName.COR2:
            if not target.is_lattice:
                raise ValueError("cor2 needs a lattice target")
            if noise.is_lattice or not math.isfinite(noise.left_extremity):
                raise ValueError("cor2 needs continuous noise bounded to the left")
            if est.sigma > target.span:
                raise ValueError(f"cor2 probe offset sigma={est.sigma} exceeds the target span {target.span}")
        elif est.name == EstimatorName.COR3:
            if not noise.is_lattice:
                raise ValueError("cor3 needs lattice noise")
        elif est.name == EstimatorName.NEUMANN:
            if not (noise.is_lattice or noise.family == Family.NORMAL):
                raise ValueError("neumann needs lattice or normal noise")
            if est.m is None or est.m > settings.MAX_M:
                raise ValueError(f"neumann needs a truncation index m in [0, {settings.MAX_M}]")
            if est.eta is not None and any(c < 0 for c, _ in est.eta):
                raise ValueError("eta atoms must carry non-negative weights")
        if est.source == "exact" and not self.has_exact_observation_law:
            raise ValueError("exact evaluation needs an analytic law of Y for this target/noise pair")
        return self

    @property
    def has_exact_observation_law(self) -> bool:
        t, e = self.target, self.noise
        if t.is_lattice or e.is_lattice:
            return True
        return t.family == Family.NORMAL and e.family == Family.NORMAL
