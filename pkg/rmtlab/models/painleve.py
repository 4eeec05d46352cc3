# rmtlab/models/painleve.py - sigma-form Painleve V parameters and tabulated solutions

from typing import Any, List, Optional, Tuple
import numpy as np
from pydantic import BaseModel, Field, ConfigDict, model_validator


class PainleveParams(BaseModel):
    alpha1: float = 0.0
    alpha2: float = 0.0
    beta1_im: float = Field(0.0, description="beta_1 = i * beta1_im")
    beta2_im: float = Field(0.0, description="beta_2 = i * beta2_im")
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _admissible(self) -> "PainleveParams":
        for name, value in (("alpha1", self.alpha1), ("alpha2", self.alpha2),
                            ("alpha1 + alpha2", self.alpha1 + self.alpha2)):
            if value <= -0.5:
                raise ValueError(f"{name} must exceed -1/2, got {value}")
        return self

    @property
    def is_zero(self) -> bool:
        return not any((self.alpha1, self.alpha2, self.beta1_im, self.beta2_im))

    @property
    def half_sum_im(self) -> float:
        """Im of (beta1 + beta2)/2."""
        return 0.5 * (self.beta1_im + self.beta2_im)

    @property
    def half_diff_im(self) -> float:
        """Im of (beta1 - beta2)/2."""
        return 0.5 * (self.beta1_im - self.beta2_im)

    @property
    def thetas(self) -> Tuple[complex, complex, complex, complex]:
        b = 1j * self.half_sum_im
        return (-self.alpha2 + b, self.alpha2 + b, self.alpha1 - b, -self.alpha1 - b)

    @property
    def sigma_zero(self) -> float:
        """sigma at s -> 0: 2 a1 a2 - (b1 + b2)^2 / 2, real because the betas are imaginary."""
        return 2.0 * self.alpha1 * self.alpha2 + 2.0 * self.half_sum_im ** 2

    def swapped(self) -> "PainleveParams":
        return PainleveParams(alpha1=self.alpha2, alpha2=self.alpha1,
                              beta1_im=self.beta2_im, beta2_im=self.beta1_im)


class PainleveSolution(BaseModel):
    """sigma~(x) = sigma(-ix) tabulated on (0, x_max] with its log-integral accumulated."""
    params: PainleveParams
    x0: float
    x_max: float
    x: Any
    sigma: Any
    dsigma: Any
    ddsigma: Any
    shooting_parameter: float = 0.0
    branch: int = Field(1, description="+1 for the x^{1+2(a1+a2)} launch, -1 for x^{1-2(a1+a2)}")
    launch_slope: float = Field(0.0, description="Linear small-x slope v0 (non-zero only for some complex thetas)")
    local_exponent: Optional[float] = None
    head_integral: float = Field(0.0, description="Integral of (sigma - sigma0)/x over [0, x0]")
    dense: Any = None
    alternative_roots: List[float] = []
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def _state(self, xs) -> np.ndarray:
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        if self.dense is None:
            return np.zeros((4, xs.size))
        return np.asarray(self.dense(xs))

    def sigma_at(self, xs) -> np.ndarray:
        return self._state(xs)[0]

    def dsigma_at(self, xs) -> np.ndarray:
        return self._state(xs)[1]

    def cumulative_integral(self, xs) -> np.ndarray:
        return self._state(xs)[3]
