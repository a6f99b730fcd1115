# deconv/models/sequences.py
from fractions import Fraction
from typing import Callable, Iterable, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from deconv.core.config import settings

Scalar = Union[int, float, complex, Fraction]


class RightLateralSeq(BaseModel):
    """Sequence vanishing below `offset`; coeffs[k] is the value at offset + k"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    offset: int = 0
    coeffs: np.ndarray
    tail_mass: float = Field(0.0, ge=0.0)

    @field_validator("coeffs", mode="before")
    @classmethod
    def coerce_coeffs(cls, v):
        arr = np.asarray(v) if not isinstance(v, np.ndarray) else v
        if arr.dtype == object:
            return np.array(arr, dtype=object).ravel()
        return np.asarray(arr, dtype=np.complex128).ravel()

    @classmethod
    def from_values(cls, values: Iterable[Scalar], offset: int = 0, tail_mass: float = 0.0) -> "RightLateralSeq":
        return cls(offset=offset, coeffs=np.asarray(list(values), dtype=np.complex128), tail_mass=tail_mass)

    @classmethod
    def exact(cls, values: Iterable[Scalar], offset: int = 0) -> "RightLateralSeq":
        """Integer / rational sequence kept in Python arithmetic"""
        return cls(offset=offset, coeffs=np.array(list(values), dtype=object))

    @classmethod
    def dirac(cls, at: int = 0, exact: bool = False) -> "RightLateralSeq":
        if exact:
            return cls.exact([1], offset=at)
        return cls.from_values([1.0], offset=at)

    @property
    def is_exact(self) -> bool:
        return self.coeffs.dtype == object

    @property
    def truncated(self) -> bool:
        return self.tail_mass > settings.TAIL_TOL

    @property
    def end(self) -> int:
        """One past the last explicit index"""
        return self.offset + len(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def at(self, index: int) -> Scalar:
        k = index - self.offset
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0 if self.is_exact else 0j

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Values at indices lo..hi inclusive, zero padded"""
        size = max(hi - lo + 1, 0)
        out = np.zeros(size, dtype=self.coeffs.dtype)
        a = max(lo, self.offset)
        b = min(hi + 1, self.end)
        if a < b:
            out[a - lo:b - lo] = self.coeffs[a - self.offset:b - self.offset]
        return out

    def norm1(self) -> float:
        return float(np.sum(np.abs(self.coeffs.astype(np.complex128)))) if len(self.coeffs) else 0.0

    def normalize(self) -> "RightLateralSeq":
        """Trim trailing coefficients below the trim tolerance"""
        mags = np.abs(self.coeffs.astype(np.complex128))
        keep = np.nonzero(mags >= settings.TRIM_TOL)[0]
        if len(keep) == 0:
            return RightLateralSeq(offset=self.offset, coeffs=self.coeffs[:0], tail_mass=self.tail_mass)
        return RightLateralSeq(offset=self.offset, coeffs=self.coeffs[:keep[-1] + 1], tail_mass=self.tail_mass)

    def scaled(self, factor: Scalar) -> "RightLateralSeq":
        return RightLateralSeq(offset=self.offset, coeffs=self.coeffs * factor, tail_mass=self.tail_mass * abs(factor))

    def real(self) -> np.ndarray:
        return np.real(self.coeffs.astype(np.complex128))


class StepDF(BaseModel):
    """Right-continuous step function Θ{seq} on the lattice scale·ℤ"""

    model_config = ConfigDict(frozen=True)

    seq: RightLateralSeq
    scale: float = Field(1.0, gt=0.0)


class DoubleSeq(BaseModel):
    """Two-index sequence p(l, z), supported on 0 <= z <= l <= lmax"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    provider: Callable[[int, int], Scalar]
    lmax: int = Field(..., ge=0)
    l0: Optional[int] = Field(None, ge=0)

    def __call__(self, ell: int, z: int) -> complex:
        if ell < 0 or z < 0 or z > ell or ell > self.lmax:
            return 0j
        return complex(self.provider(ell, z))

    def table(self) -> np.ndarray:
        """Dense lower-triangular array p[l, z]"""
        size = self.lmax + 1
        out = np.zeros((size, size), dtype=np.complex128)
        for ell in range(size):
            for z in range(ell + 1):
                out[ell, z] = self.provider(ell, z)
        return out

    def leading_limit(self) -> int:
        """L0: first l with p(l, 0) = 0, or lmax + 1"""
        if self.l0 is not None:
            return min(self.l0, self.lmax + 1)
        for ell in range(self.lmax + 1):
            if self.provider(ell, 0) == 0:
                return ell
        return self.lmax + 1

    @classmethod
    def from_single(cls, u: RightLateralSeq, lmax: int) -> "DoubleSeq":
        """p(l, z) = u(z), the single-index reduction"""
        return cls(provider=lambda ell, z: u.at(z), lmax=lmax)


class InverseTable(BaseModel):
    """γ(z) (kind 'gamma') or the triangular β(l, z) (kind 'beta')"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    kind: Literal["gamma", "beta"] = "gamma"

    def at(self, *index: int) -> complex:
        if self.kind == "gamma":
            (z,) = index
            return complex(self.values[z]) if 0 <= z < len(self.values) else 0j
        ell, z = index
        if 0 <= z <= ell < self.values.shape[0]:
            return complex(self.values[ell, z])
        return 0j

    def as_seq(self) -> RightLateralSeq:
        if self.kind != "gamma":
            raise ValueError("only the single-index table is a sequence")
        return RightLateralSeq(offset=0, coeffs=self.values)
