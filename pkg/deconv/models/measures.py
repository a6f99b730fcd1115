# deconv/models/measures.py
from typing import Iterable, List, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.special import ndtr
from scipy.stats import norm

from deconv.core.config import settings
from deconv.utils.numeric import ArrayLike


class DiracAt(BaseModel):
    kind: Literal["dirac"] = "dirac"
    location: float


class NormalLaw(BaseModel):
    kind: Literal["normal"] = "normal"
    mean: float
    variance: float = Field(..., ge=0.0)


Component = Union[DiracAt, NormalLaw]


class SignedMixture(BaseModel):
    """Finite signed measure sum_i coeff_i * component_i.

    Components are stored column-wise: a term with variance 0 is the Dirac
    atom at its location, any other term is N(location, variance).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coeffs: np.ndarray
    locations: np.ndarray
    variances: np.ndarray

    @field_validator("coeffs", "locations", "variances", mode="before")
    @classmethod
    def as_float_array(cls, v):
        return np.asarray(v, dtype=float).ravel()

    @model_validator(mode="after")
    def check_shapes(self):
        if not (len(self.coeffs) == len(self.locations) == len(self.variances)):
            raise ValueError("coefficient, location and variance columns differ in length")
        if np.any(self.variances < 0):
            raise ValueError("component variances must be non-negative")
        return self

    # construction

    @classmethod
    def zero(cls) -> "SignedMixture":
        return cls(coeffs=[], locations=[], variances=[])

    @classmethod
    def dirac(cls, location: float = 0.0, coeff: float = 1.0) -> "SignedMixture":
        return cls(coeffs=[coeff], locations=[location], variances=[0.0])

    @classmethod
    def normal(cls, mean: float, variance: float, coeff: float = 1.0) -> "SignedMixture":
        return cls(coeffs=[coeff], locations=[mean], variances=[variance])

    @classmethod
    def atoms(cls, locations: Iterable[float], weights: Iterable[float]) -> "SignedMixture":
        locations = np.asarray(list(locations), dtype=float)
        return cls(coeffs=list(weights), locations=locations, variances=np.zeros(len(locations)))

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[float, Component]]) -> "SignedMixture":
        coeffs, locs, variances = [], [], []
        for coeff, component in terms:
            coeffs.append(coeff)
            if isinstance(component, DiracAt):
                locs.append(component.location)
                variances.append(0.0)
            else:
                locs.append(component.mean)
                variances.append(component.variance)
        return cls(coeffs=coeffs, locations=locs, variances=variances)

    # inspection

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self) -> List[Tuple[float, Component]]:
        out = []
        for c, x, v in zip(self.coeffs, self.locations, self.variances):
            component = DiracAt(location=x) if v == 0 else NormalLaw(mean=x, variance=v)
            out.append((float(c), component))
        return out

    @property
    def is_atomic(self) -> bool:
        return bool(np.all(self.variances == 0))

    @property
    def atomic_mask(self) -> np.ndarray:
        return self.variances == 0

    def total_mass(self) -> float:
        return float(np.sum(self.coeffs))

    def coeff_norm(self) -> float:
        """sum |coeff|; the total variation when the mixture is atomic and merged"""
        return float(np.sum(np.abs(self.coeffs)))

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.coeffs >= 0))

    # algebra

    def merged(self, tol: float = None) -> "SignedMixture":
        """Combine coincident components and drop exact zeros"""
        tol = settings.ATOM_TOL if tol is None else tol
        if len(self) == 0:
            return self
        order = np.lexsort((self.locations, self.variances))
        locs = self.locations[order]
        variances = self.variances[order]
        coeffs = self.coeffs[order]
        new_group = np.ones(len(locs), dtype=bool)
        new_group[1:] = (np.abs(np.diff(locs)) > tol) | (np.abs(np.diff(variances)) > tol)
        starts = np.nonzero(new_group)[0]
        summed = np.add.reduceat(coeffs, starts)
        keep = summed != 0
        return SignedMixture(coeffs=summed[keep], locations=locs[starts][keep], variances=variances[starts][keep])

    def __add__(self, other: "SignedMixture") -> "SignedMixture":
        return SignedMixture(
            coeffs=np.concatenate([self.coeffs, other.coeffs]),
            locations=np.concatenate([self.locations, other.locations]),
            variances=np.concatenate([self.variances, other.variances]),
        ).merged()

    def __neg__(self) -> "SignedMixture":
        return self.scaled(-1.0)

    def __sub__(self, other: "SignedMixture") -> "SignedMixture":
        return self + (-other)

    def scaled(self, factor: float) -> "SignedMixture":
        return SignedMixture(coeffs=self.coeffs * factor, locations=self.locations, variances=self.variances)

    def convolve(self, other: "SignedMixture") -> "SignedMixture":
        """Dirac and normal components convolve by adding locations and variances"""
        if len(self) == 0 or len(other) == 0:
            return SignedMixture.zero()
        return SignedMixture(
            coeffs=np.outer(self.coeffs, other.coeffs).ravel(),
            locations=np.add.outer(self.locations, other.locations).ravel(),
            variances=np.add.outer(self.variances, other.variances).ravel(),
        ).merged()

    def power(self, k: int) -> "SignedMixture":
        result = SignedMixture.dirac(0.0)
        for _ in range(k):
            result = result.convolve(self)
        return result

    def shifted(self, by: float) -> "SignedMixture":
        return SignedMixture(coeffs=self.coeffs, locations=self.locations + by, variances=self.variances)

    # evaluation

    def cdf(self, x: ArrayLike) -> np.ndarray:
        """F(x) = mixture mass of (-inf, x]"""
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, 1)
        atomic = self.atomic_mask
        out = np.zeros(flat.shape[0])
        if np.any(atomic):
            out += (flat >= self.locations[atomic][None, :]) @ self.coeffs[atomic]
        if np.any(~atomic):
            sd = np.sqrt(self.variances[~atomic])
            out += ndtr((flat - self.locations[~atomic][None, :]) / sd[None, :]) @ self.coeffs[~atomic]
        return out.reshape(x.shape)

    def pdf(self, x: ArrayLike) -> np.ndarray:
        """Density of the continuous part"""
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, 1)
        cont = ~self.atomic_mask
        if not np.any(cont):
            return np.zeros(x.shape)
        sd = np.sqrt(self.variances[cont])
        dens = norm.pdf(flat, loc=self.locations[cont][None, :], scale=sd[None, :])
        return (dens @ self.coeffs[cont]).reshape(x.shape)

    def atom_mass(self, x: ArrayLike) -> np.ndarray:
        """μ{x}: mass of the atoms within the atom tolerance of x"""
        x = np.asarray(x, dtype=float)
        atomic = self.atomic_mask
        if not np.any(atomic):
            return np.zeros(x.shape)
        hit = np.abs(x.reshape(-1, 1) - self.locations[atomic][None, :]) <= settings.ATOM_TOL
        return (hit @ self.coeffs[atomic]).reshape(x.shape)

    def mass_below(self, a: float) -> float:
        """Mass of (-inf, a], counting atoms within the atom tolerance of a"""
        atomic = self.atomic_mask
        hit = atomic & (self.locations <= a + settings.ATOM_TOL)
        total = float(np.sum(self.coeffs[hit]))
        if np.any(~atomic):
            sd = np.sqrt(self.variances[~atomic])
            total += float(ndtr((a - self.locations[~atomic]) / sd) @ self.coeffs[~atomic])
        return total
