# deconv/models/samples.py
import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from deconv.utils.numeric import ArrayLike


class EmpiricalSample(BaseModel):
    """Sorted observations carrying the e.d.f. F(ξ, n) = #{Y_k <= ξ} / n"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    obs: np.ndarray

    @field_validator("obs", mode="before")
    @classmethod
    def sort_obs(cls, v):
        arr = np.sort(np.asarray(v, dtype=float).ravel())
        if not np.all(np.isfinite(arr)):
            raise ValueError("observations must be finite")
        return arr

    @property
    def n(self) -> int:
        return len(self.obs)

    def edf(self, xi: ArrayLike) -> np.ndarray:
        if self.n == 0:
            return np.zeros(np.shape(xi))
        return np.searchsorted(self.obs, np.asarray(xi, dtype=float), side="right") / self.n

    def pooled(self, other: "EmpiricalSample") -> "EmpiricalSample":
        return EmpiricalSample(obs=np.concatenate([self.obs, other.obs]))
