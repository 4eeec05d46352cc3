# rmtlab/models/asymptotics.py - Asymptotic determinant predictions

import cmath
import math
from enum import Enum
from typing import Dict, Optional, Tuple
from pydantic import BaseModel, Field, ConfigDict, model_validator

from rmtlab.models.painleve import PainleveParams


class Regime(str, Enum):
    SZEGO = "szego"
    SEPARATED = "separated"
    MERGING = "merging"
    ENVELOPE = "envelope"


class AsymptoticPrediction(BaseModel):
    log_value: complex
    regime: Regime
    n: int
    kappa: Optional[int] = None
    symbol: Optional[dict] = Field(None, description="Echo of the symbol document")
    tail_bound: float = Field(0.0, description="Bound on the dropped |k| > K terms of the V series")

    @model_validator(mode="after")
    def _finite(self) -> "AsymptoticPrediction":
        if not (math.isfinite(self.log_value.real) and math.isfinite(self.log_value.imag)):
            raise ValueError(f"non-finite prediction {self.log_value}")
        return self

    @property
    def value(self) -> complex:
        return cmath.exp(self.log_value)


class MergingParams(BaseModel):
    """Exponents of the two-conjugate-pair symbol f_{p,t}: alpha0 at z=1, alpha3 at z=-1,
    (alpha1, beta1) at e^{i(p-t)} and (alpha2, beta2) at e^{i(p+t)}, mirrored with flipped beta."""
    alpha0: float = Field(0.0, gt=-0.5)
    alpha3: float = Field(0.0, gt=-0.5)
    alpha1: float = Field(0.0, gt=-0.5)
    alpha2: float = Field(0.0, gt=-0.5)
    beta1_im: float = 0.0
    beta2_im: float = 0.0
    model_config = ConfigDict(frozen=True)

    @property
    def painleve(self) -> PainleveParams:
        return PainleveParams(alpha1=self.alpha1, alpha2=self.alpha2,
                              beta1_im=self.beta1_im, beta2_im=self.beta2_im)

    def locations(self, p: float, t: float) -> Tuple[Tuple[float, float, float], ...]:
        """(theta_j, alpha_j, beta_im_j) for j = 0..5 in increasing angle."""
        two_pi = 2.0 * math.pi
        return (
            (0.0, self.alpha0, 0.0),
            (p - t, self.alpha1, self.beta1_im),
            (p + t, self.alpha2, self.beta2_im),
            (math.pi, self.alpha3, 0.0),
            (two_pi - p - t, self.alpha2, -self.beta2_im),
            (two_pi - p + t, self.alpha1, -self.beta1_im),
        )


class DiagnosticRow(BaseModel):
    n: int
    t: float = 0.0
    exact: float
    predicted: float

    @property
    def ratio(self) -> float:
        return self.exact / self.predicted if self.predicted else math.nan

    def as_dict(self) -> Dict[str, float]:
        return {"n": self.n, "t": self.t, "exact": self.exact, "predicted": self.predicted, "ratio": self.ratio}
