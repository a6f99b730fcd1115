# deconv/models/noise.py
from typing import Callable, Dict, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from deconv.core.config import settings
from deconv.models.sequences import RightLateralSeq
from deconv.utils.numeric import ArrayLike, lattice_floor


class LatticeNoise(BaseModel):
    """Error law with weights pmf(z) at z0 + t*z, z = 0, 1, ..."""

    model_config = ConfigDict(frozen=True)

    z0: float = 0.0
    t: float = Field(1.0, gt=0.0)
    pmf: RightLateralSeq
    family: Optional[str] = None
    params: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_pmf(self):
        pmf = self.pmf
        if pmf.offset != 0:
            raise ValueError(f"lattice pmf must start at index 0, got offset {pmf.offset}")
        values = pmf.coeffs.astype(np.complex128)
        if np.any(np.abs(values.imag) > 0) or np.any(values.real < 0):
            raise ValueError("lattice pmf must be real and non-negative")
        if len(values) == 0 or values[0].real <= 0:
            raise ValueError("lattice pmf must have positive mass at its left extremity")
        total = float(np.sum(values.real))
        if abs(total - 1.0) > pmf.tail_mass + 1e-9:
            raise ValueError(f"lattice pmf sums to {total}, expected 1")
        return self

    @classmethod
    def from_weights(cls, weights, z0: float = 0.0, t: float = 1.0, **kwargs) -> "LatticeNoise":
        return cls(z0=z0, t=t, pmf=RightLateralSeq.from_values(weights), **kwargs)

    @classmethod
    def degenerate(cls, z0: float = 0.0, t: float = 1.0) -> "LatticeNoise":
        return cls.from_weights([1.0], z0=z0, t=t)

    @property
    def weights(self) -> np.ndarray:
        return self.pmf.real()

    @property
    def pmf0(self) -> float:
        """F_ε{z0}"""
        return float(self.weights[0])

    @property
    def lam(self) -> float:
        """λ_{z0} = 1 / F_ε{z0}"""
        return 1.0 / self.pmf0

    @property
    def locations(self) -> np.ndarray:
        return self.z0 + self.t * np.arange(len(self.pmf))

    def cdf(self, x: ArrayLike) -> np.ndarray:
        partial = np.cumsum(self.weights)
        idx = lattice_floor(np.asarray(x, dtype=float) - self.z0, self.t)
        out = partial[np.clip(idx, 0, len(partial) - 1)]
        return np.where(idx < 0, 0.0, out)

    def atom(self, x: ArrayLike) -> np.ndarray:
        """F_ε{x}: mass at x, zero off the lattice"""
        q = (np.asarray(x, dtype=float) - self.z0) / self.t
        k = np.rint(q).astype(np.int64)
        on = (np.abs(q - k) <= settings.ATOM_TOL * np.maximum(1.0, np.abs(q))) & (k >= 0) & (k < len(self.pmf))
        return np.where(on, self.weights[np.clip(k, 0, len(self.pmf) - 1)], 0.0)


class NormalNoise(BaseModel):
    """ε ~ N(c, sigma^2)"""

    model_config = ConfigDict(frozen=True)

    c: float = 0.0
    sigma: float = Field(..., gt=0.0)


NoiseModel = Union[LatticeNoise, NormalNoise]


class ProbeNoise(BaseModel):
    """Continuous left-bounded error law read at z0 + sigma + span*z"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    z0: float = 0.0
    sigma: float = Field(1.0, gt=0.0)
    span: float = Field(1.0, gt=0.0)
    cdf: Callable[[ArrayLike], ArrayLike]

    def u_sequence(self, zmax: int) -> RightLateralSeq:
        points = self.z0 + self.sigma + self.span * np.arange(zmax + 1)
        return RightLateralSeq.from_values(np.asarray(self.cdf(points), dtype=float))


class SupportGrid(BaseModel):
    """Strictly increasing support points ξ_l of the target variable"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray
    span: Optional[float] = Field(None, gt=0.0)
    probes: Optional[np.ndarray] = None

    @field_validator("points", "probes", mode="before")
    @classmethod
    def as_array(cls, v):
        return None if v is None else np.asarray(v, dtype=float).ravel()

    @model_validator(mode="after")
    def check_points(self):
        pts = self.points
        if len(pts) == 0:
            raise ValueError("support grid needs at least one point")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("support points must be strictly increasing")
        if self.span is not None:
            expected = pts[0] + self.span * np.arange(len(pts))
            if not np.allclose(pts, expected, rtol=0.0, atol=1e-9 * max(1.0, float(np.max(np.abs(pts))))):
                raise ValueError("support points are not equidistant with the given span")
        if self.probes is not None and len(self.probes) != len(pts):
            raise ValueError("one probe point per support point is required")
        return self

    @classmethod
    def equidistant(cls, xi0: float, span: float, size: int, probes=None) -> "SupportGrid":
        return cls(points=xi0 + span * np.arange(size), span=span, probes=probes)

    @property
    def xi0(self) -> float:
        return float(self.points[0])

    def __len__(self) -> int:
        return len(self.points)

    def probe_points(self) -> np.ndarray:
        """ζ_l, defaulting to ξ_{l+1}; the last probe repeats the last gap"""
        if self.probes is not None:
            return self.probes
        pts = self.points
        gap = self.span if self.span is not None else (pts[-1] - pts[-2] if len(pts) > 1 else 1.0)
        return np.append(pts[1:], pts[-1] + gap)
