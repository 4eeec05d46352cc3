# rmtlab/models/gmc.py - Truncated Gaussian fields and discrete GMC measures

import math
from enum import Enum
from typing import Any, Optional
import numpy as np
from pydantic import BaseModel, Field, ConfigDict, model_validator


class ShiftSign(str, Enum):
    NONE = "0"
    ORTHOGONAL = "+"
    SYMPLECTIC = "-"

    @property
    def factor(self) -> int:
        return {"0": 0, "+": 1, "-": -1}[self.value]


class Normalization(str, Enum):
    DETERMINANT = "determinant"
    MC = "mc"
    GAUSSIAN = "gaussian"


class TruncatedGaussianField(BaseModel):
    """N_j, j = 1..k, i.i.d. standard normal."""
    k: int = Field(..., ge=1)
    coefficients: Any
    shift: ShiftSign = ShiftSign.NONE
    model_config = ConfigDict(arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _length(self) -> "TruncatedGaussianField":
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (self.k,):
            raise ValueError(f"expected {self.k} coefficients, got shape {self.coefficients.shape}")
        return self


class FieldSample(BaseModel):
    field: TruncatedGaussianField
    grid: Any
    X: Any
    X_hat: Any
    x: Any = Field(..., description="Deterministic cosine shift, signed by the group type")
    x_hat: Any = Field(..., description="Deterministic sine shift, signed by the group type")
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def y(self, alpha: float, beta_im: float = 0.0) -> np.ndarray:
        """Y = 2a X - 2i beta X_hat with beta = i * beta_im."""
        return 2.0 * alpha * np.asarray(self.X) + 2.0 * beta_im * np.asarray(self.X_hat)


class DiscreteMeasure(BaseModel):
    theta: Any
    weights: Any
    normalization: Normalization
    degenerate: bool = False
    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / len(self.theta)

    def total_mass(self, mask: Optional[Any] = None) -> float:
        w = np.asarray(self.weights, dtype=float)
        if mask is not None:
            w = np.where(mask, w, 0.0)
        return float(w.sum() * self.spacing)
