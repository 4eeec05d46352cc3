# rmtlab/models/numerics.py - Plumbing types shared by the numerical kernels

import math
from typing import Any, List
from pydantic import BaseModel, Field, ConfigDict, model_validator

from rmtlab.config import settings


class QuadratureSpec(BaseModel):
    abs_tol: float = Field(default_factory=lambda: settings.quad_abs_tol, gt=0)
    rel_tol: float = Field(default_factory=lambda: settings.quad_rel_tol, gt=0)
    max_subdivisions: int = Field(default_factory=lambda: settings.quad_limit, ge=1,
                                  description="Node cap per panel before an accuracy error is raised")
    singularities: List[float] = Field(default=[], description="Angles in [0, 2pi) where the integrand is singular")
    exponents: List[float] = Field(default=[], description="Local power |theta - theta_j|^e at each singularity (0 for a pure jump)")
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="before")
    @classmethod
    def _sorted_distinct(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        sing = [float(x) for x in data.get("singularities", [])]
        expo = [float(e) for e in data.get("exponents", [])] or [0.0] * len(sing)
        if len(expo) != len(sing):
            raise ValueError("exponents must match singularities one-to-one")
        merged = {}
        for theta, e in zip(sing, expo):
            if not 0.0 <= theta < 2 * math.pi:
                raise ValueError(f"singularity {theta} outside [0, 2pi)")
            if e <= -1.0:
                raise ValueError(f"exponent {e} at {theta} is not integrable")
            merged[theta] = min(merged.get(theta, e), e)
        keys = sorted(merged)
        return {**data, "singularities": keys, "exponents": [merged[k] for k in keys]}


class RngStream(BaseModel):
    seed: int = Field(..., ge=0, lt=2**64)
    stream: int = Field(0, ge=0)
    model_config = ConfigDict(frozen=True)

    def child(self, offset: int) -> "RngStream":
        """Stream for a sub-task; distinct offsets never share draws."""
        return RngStream(seed=self.seed, stream=self.stream * 1_000_003 + offset + 1)


class OdeSolution(BaseModel):
    """Dense ODE output: the accepted steps plus a callable interpolant."""
    x: Any
    y: Any
    interpolant: Any
    nfev: int = 0
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def __call__(self, xs):
        return self.interpolant(xs)
