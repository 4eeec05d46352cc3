# rmtlab/models/run_config.py - Validated experiment configuration shared by every subcommand

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional
from pydantic import BaseModel, Field, ConfigDict, field_validator, model_validator

from rmtlab.models.ensembles import Group, GroupKind

SUBCOMMANDS = ("sample", "det", "identity-check", "asym", "painleve", "mom", "gmc", "ubm", "wick", "sweep")
LIST_FIELDS = ("sigma", "values", "thetas", "alphas", "ks")


class RunConfig(BaseModel):
    subcommand: Literal["sample", "det", "identity-check", "asym", "painleve", "mom", "gmc", "ubm", "wick", "sweep"]
    mode: Optional[str] = Field(None, description="Subcommand variant, e.g. ehrhardt / uniform-t for asym")
    group: GroupKind = GroupKind.U
    n: int = Field(4, ge=0)
    m: int = Field(1, ge=1)
    alpha: float = 0.0
    beta_im: float = 0.0
    kappa: Optional[int] = Field(None, ge=1, le=4)
    theta: float = 0.0
    theta_prime: Optional[float] = None
    symbol: str = "trivial"
    symbol_file: Optional[str] = None
    p: float = 1.5707963267948966
    t: float = 0.1
    alpha0: float = 0.0
    alpha1: float = 0.0
    alpha2: float = 0.0
    alpha3: float = 0.0
    beta1_im: float = 0.0
    beta2_im: float = 0.0
    x_max: float = Field(40.0, gt=0)
    k: int = Field(8, ge=0)
    T: float = Field(1.0, ge=0)
    dt: float = Field(0.01, gt=0)
    time_rescale: bool = Field(False, description="Run Dyson paths at half speed (U_t -> U_{t/2})")
    samples: Optional[int] = Field(None, ge=1)
    grid: Optional[int] = Field(None, ge=8)
    eps: float = Field(0.6, gt=0)
    s: float = Field(0.0, ge=0, lt=1)
    estimator: str = "mc"
    normalization: str = "determinant"
    sigma: List[int] = []
    thetas: List[float] = []
    alphas: List[float] = []
    ks: List[int] = []
    target: Optional[str] = Field(None, description="Subcommand swept by `sweep`")
    axis: Optional[str] = None
    values: List[float] = []
    seed: Optional[int] = None
    output: Optional[str] = None
    format: Literal["csv", "json"] = "csv"
    model_config = ConfigDict(extra="forbid")

    @field_validator(*LIST_FIELDS, mode="before")
    @classmethod
    def _split_list(cls, v):
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v

    @field_validator("output")
    @classmethod
    def _output_dir(cls, v):
        if v is not None and not Path(v).parent.exists():
            raise ValueError(f"output directory {Path(v).parent} does not exist")
        return v

    @model_validator(mode="after")
    def _sweep_target(self) -> "RunConfig":
        if self.subcommand == "sweep":
            if self.target not in SUBCOMMANDS or self.target == "sweep":
                raise ValueError(f"sweep needs target among {SUBCOMMANDS[:-1]}")
            if self.axis is None or self.axis not in NUMERIC_FIELDS:
                raise ValueError(f"sweep axis must be a numeric field, got {self.axis!r}")
        return self

    @property
    def group_model(self) -> Group:
        return Group(kind=self.group, n=self.n)

    def provenance(self) -> Dict[str, str]:
        """Non-default fields as strings; re-parses into an equal config."""
        out = {}
        for key, value in self.model_dump(exclude_none=True).items():
            if isinstance(value, list):
                value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            elif hasattr(value, "value"):
                value = value.value
            out[key] = str(value)
        return out


NUMERIC_FIELDS = tuple(
    name for name, info in RunConfig.model_fields.items()
    if info.annotation in (int, float, Optional[int], Optional[float]) and name not in ("seed",)
)


def parse_key_values(lines: List[str]) -> Dict[str, Any]:
    """key=value lines; blank lines and '#' comments are skipped."""
    out: Dict[str, Any] = {}
    for raw in lines:
        line = raw.strip()
        if line.startswith("#"):
            line = line[1:].strip()
            if "=" not in line:
                continue
        if not line or "=" not in line:
            continue
        key, value = line.split("=", 1)
        out[key.strip().replace("-", "_")] = value.strip()
    return out
