# rmtlab/models/mom.py - Moments of moments queries and phase reports

from enum import Enum
from typing import List, Optional
from pydantic import BaseModel, Field, ConfigDict

from rmtlab.models.ensembles import Group


class Estimator(str, Enum):
    MC = "mc"
    QUADRATURE_M1 = "quadrature-m1"


class Phase(str, Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    INTERMEDIATE = "intermediate"
    SUPERCRITICAL = "supercritical"


class MoMQuery(BaseModel):
    group: Group
    m: int = Field(..., ge=1)
    alpha: float = Field(..., ge=0.0)
    estimator: Estimator = Estimator.MC
    samples: int = Field(1000, ge=1)
    grid: Optional[int] = Field(None, ge=8, description="Angle grid size; defaults to 8 x matrix size (mc) or 64 (quadrature)")
    model_config = ConfigDict(frozen=True)


class MoMEstimate(BaseModel):
    query: MoMQuery
    estimate: float
    standard_error: float


class PhaseReport(BaseModel):
    phase: Phase
    exponent: float = Field(..., description="Predicted growth exponent of MoM in n")
    log_factor: bool = False
    critical_values: List[float] = []
