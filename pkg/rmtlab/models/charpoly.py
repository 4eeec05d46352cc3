# rmtlab/models/charpoly.py - Fields sampled on angle (and time x angle) grids

from typing import Any, Optional
import numpy as np
from pydantic import BaseModel, Field, ConfigDict

from rmtlab.models.ensembles import EnsembleSample


class FieldGrid(BaseModel):
    """Complex field values on a uniform angle grid, optionally with a leading time axis."""
    theta: Any = Field(..., description="Angle grid, uniform on [0, 2pi)")
    values: Any = Field(..., description="Shape (len(theta),) or (len(times), len(theta))")
    times: Optional[Any] = None
    infinite: Optional[Any] = Field(None, description="Mask of grid points where the value is +inf")
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def fourier_modes(self, k_max: int) -> np.ndarray:
        """F_k for k = -k_max..k_max along the last axis (k_max index is the zero mode)."""
        vals = np.asarray(self.values, dtype=complex)
        size = vals.shape[-1]
        if 2 * k_max + 1 > size:
            raise ValueError(f"grid of {size} points cannot resolve {k_max} modes")
        coeffs = np.fft.fft(vals, axis=-1) / size
        ks = np.arange(-k_max, k_max + 1)
        return np.take(coeffs, np.mod(ks, size), axis=-1)


class LogCharPolyField(BaseModel):
    sample: EnsembleSample
    theta: Any
    values: Any = Field(..., description="Re = log|p|, Im = sum of per-factor branches")
    model_config = ConfigDict(arbitrary_types_allowed=True)
