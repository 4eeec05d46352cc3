# rmtlab/config.py - Runtime settings loaded from environment / .env

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict
from rmtlab.utils.logger import logger

class Settings(BaseSettings):
    """
    All config is loaded from environment / .env with the RMTLAB_ prefix.
    Defaults are the values the numerical checks were calibrated with.
    """
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="RMTLAB_",
        case_sensitive=False,
        extra="ignore" # Allow extra fields in .env not defined here
    )

    # reproducibility
    seed:                    int = Field(0, description="Seed fallback when a run config gives none")
    log_level:               str = Field("INFO")

    # quadrature
    quad_abs_tol:            float = Field(1e-12, gt=0)
    quad_rel_tol:            float = Field(1e-10, gt=0)
    quad_limit:              int = Field(500, ge=10)

    # eigensolver
    unitary_tol:             float = Field(1e-8, gt=0)

    # asymptotic series
    truncation_k:            int = Field(64, ge=1)
    separation_eps:          float = Field(1e-2, gt=0)

    # Painleve shooting
    painleve_x0:             float = Field(1e-4, gt=0)
    painleve_tol:            float = Field(1e-10, gt=0)
    painleve_horizon:        float = Field(48.0, gt=0)

    # dynamics / Monte Carlo
    dyson_max_halvings:      int = Field(20, ge=1)
    default_samples:         int = Field(1000, ge=1)

    # output
    float_format:            str = Field("%.17g")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {v!r}")
        return level


try:
    settings = Settings()
    logger.setLevel(settings.log_level)
except Exception as e:
    logger.error(f"Error loading rmtlab settings: {e}")
    raise RuntimeError(f"Error loading rmtlab settings: {e}. Application cannot proceed.")
