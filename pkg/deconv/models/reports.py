# deconv/models/reports.py
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class JordanCase(str, Enum):
    SPLIT = "split"
    NONPOSITIVE = "nonpositive"
    CONTINUOUS_LOWER_BOUND = "continuous_lower_bound"


class TVReport(BaseModel):
    """Total variation of π_{η*μ_ε}, i.e. the norm of the operator T"""

    model_config = ConfigDict(frozen=True)

    tv: float = Field(..., ge=0.0)
    atom_overlap: float
    eta_mass: float
    invertible_sufficient: bool
    jordan_case: JordanCase


class ResultRow(BaseModel):
    xi: float
    fx_true: Optional[float] = None
    fy_true: Optional[float] = None
    est_mean: float
    est_sd: float


class ResultFrame(BaseModel):
    """Grid-ordered Monte Carlo summary of one scenario run"""

    scenario: Optional[str] = None
    estimator: Optional[str] = None
    replications: int = Field(0, ge=0)
    rows: List[ResultRow] = Field(default_factory=list)
    per_replication: Optional[List[List[float]]] = None

    @property
    def xi(self) -> List[float]:
        return [row.xi for row in self.rows]

    @property
    def est_mean(self) -> List[float]:
        return [row.est_mean for row in self.rows]
