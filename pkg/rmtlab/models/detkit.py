# rmtlab/models/detkit.py - Fisher-Hartwig symbols and determinant reports

import math
from typing import Dict, List, Optional, Tuple, Union
from pydantic import BaseModel, Field, ConfigDict, field_validator, model_validator

TWO_PI = 2.0 * math.pi


class Singularity(BaseModel):
    theta: float = Field(..., ge=0.0, lt=TWO_PI)
    alpha: float = Field(0.0, gt=-0.5)
    beta_im: float = Field(0.0, description="beta = i * beta_im")
    model_config = ConfigDict(frozen=True)

    @property
    def beta(self) -> complex:
        return 1j * self.beta_im

    @property
    def trivial(self) -> bool:
        return self.alpha == 0.0 and self.beta_im == 0.0


class FHSymbol(BaseModel):
    """e^{V(z)} L(z) prod_j |z - z_j|^{2 alpha_j} z^{beta_j} g_{z_j, beta_j}(z) z_j^{-beta_j}.

    V and the Laurent factor L are finite coefficient lists (k, c); an empty
    Laurent list means L = 1.
    """
    V: Tuple[Tuple[int, complex], ...] = ()
    singularities: Tuple[Singularity, ...] = ()
    laurent: Tuple[Tuple[int, complex], ...] = ()
    model_config = ConfigDict(frozen=True)

    @field_validator("V", "laurent", mode="before")
    @classmethod
    def _merge_coefficients(cls, v):
        if isinstance(v, dict):
            v = v.items()
        merged: Dict[int, complex] = {}
        for k, c in v:
            merged[int(k)] = merged.get(int(k), 0j) + complex(c)
        return tuple(sorted((k, c) for k, c in merged.items() if c != 0))

    @field_validator("singularities", mode="before")
    @classmethod
    def _sort_singularities(cls, v):
        items = [s if isinstance(s, Singularity) else Singularity(**s) for s in v]
        return tuple(sorted(items, key=lambda s: s.theta))

    @model_validator(mode="after")
    def _distinct(self) -> "FHSymbol":
        thetas = [s.theta for s in self.singularities]
        if len(set(thetas)) != len(thetas):
            raise ValueError("singularity locations must be distinct")
        return self

    @property
    def v_dict(self) -> Dict[int, complex]:
        return dict(self.V)

    @property
    def laurent_dict(self) -> Dict[int, complex]:
        return dict(self.laurent) if self.laurent else {0: 1 + 0j}

    @property
    def active_singularities(self) -> List[Singularity]:
        return [s for s in self.singularities if not s.trivial]

    @property
    def is_even(self) -> bool:
        v = self.v_dict
        if any(abs(v.get(k, 0) - v.get(-k, 0)) > 1e-14 for k in v):
            return False
        lau = self.laurent_dict
        if any(abs(lau.get(k, 0) - lau.get(-k, 0)) > 1e-14 for k in lau):
            return False
        sing = {round(s.theta, 12): s for s in self.active_singularities}
        for s in sing.values():
            mirror = round((TWO_PI - s.theta) % TWO_PI, 12)
            partner = sing.get(mirror)
            if partner is None or partner.alpha != s.alpha or partner.beta_im != -s.beta_im:
                return False
        return True

    def to_document(self) -> dict:
        doc = {
            "V": [[k, c.real, c.imag] for k, c in self.V],
            "singularities": [{"theta": s.theta, "alpha": s.alpha, "beta_im": s.beta_im} for s in self.singularities],
        }
        if self.laurent:
            doc["laurent"] = [[k, c.real, c.imag] for k, c in self.laurent]
        return doc

    @classmethod
    def from_document(cls, doc: dict) -> "FHSymbol":
        return cls(
            V=[(k, complex(re, im)) for k, re, im in doc.get("V", [])],
            singularities=doc.get("singularities", []),
            laurent=[(k, complex(re, im)) for k, re, im in doc.get("laurent", [])],
        )


class ReflectedSymbol(BaseModel):
    """iota(z) = h(z) h(1/z) for a base symbol h."""
    base: FHSymbol
    model_config = ConfigDict(frozen=True)

    @property
    def is_even(self) -> bool:
        return True


Symbol = Union[FHSymbol, ReflectedSymbol]


class DetReport(BaseModel):
    n: int
    value: complex
    log_value: complex
    kappa: Optional[int] = None
    condition: float = Field(1.0, description="2-norm condition number of the determinant matrix")


class HeineSzegoReport(BaseModel):
    n: int
    samples: int
    mc_estimate: complex
    standard_error: float
    determinant: complex
    z_score: float


class ConnectionReport(BaseModel):
    n: int
    residuals: Dict[int, float] = Field(..., description="kappa -> relative residual")
    phi_values: Dict[int, Tuple[complex, complex, complex]] = Field(..., description="kappa -> (Phi(0), Phi(1), Phi(-1))")
