# rmtlab/models/ubm.py - Dyson paths, OU coefficient paths and Wick pairing systems

from typing import Any, Dict, List, Tuple
import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, ConfigDict


class DysonPath(BaseModel):
    n: int = Field(..., ge=1)
    times: Any
    angles: Any = Field(..., description="(len(times), n); increasing in j, continuous in t, span < 2pi")
    substeps: int = Field(0, description="Number of halvings performed")
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def traces(self, k: int) -> np.ndarray:
        """Tr U_t^k at every stored time."""
        return np.exp(1j * k * np.asarray(self.angles)).sum(axis=1)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(np.mod(np.asarray(self.angles), 2 * np.pi),
                             columns=[f"theta_{j + 1}" for j in range(self.n)])
        frame.insert(0, "t", np.asarray(self.times))
        return frame


class OUFieldPath(BaseModel):
    k_max: int = Field(..., ge=1)
    times: Any
    coefficients: Any = Field(..., description="(len(times), k_max) complex, column k-1 holds A_k")
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def field(self, theta) -> np.ndarray:
        """Z(t, theta) = sum_k A_k(t) e^{-ik theta} on the stored times."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        ks = np.arange(1, self.k_max + 1)
        return np.asarray(self.coefficients) @ np.exp(-1j * np.outer(ks, theta))


class PairingSystem(BaseModel):
    j: int = Field(..., ge=1)
    pairings: List[Dict[int, int]] = Field(..., description="C_{2j} as involutions on 1..2j")
    lifted: List[Dict[int, int]] = Field(..., description="pi tilde on 1..4j")
    rho: Dict[int, int]
    orbits: List[List[Tuple[int, ...]]] = Field(..., description="Orbits of pi tilde rho on the even indices")


class WickReport(BaseModel):
    j: int
    sigma: List[int]
    n: int
    exact: float
    mc: float = float("nan")
    se: float = float("nan")
    exact_mode: bool = Field(True, description="False when the right side was evaluated by Monte Carlo")
