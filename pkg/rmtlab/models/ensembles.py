# rmtlab/models/ensembles.py - Compact groups and their sampled spectra

from enum import Enum
from typing import Any, List, Optional
from pydantic import BaseModel, Field, ConfigDict, model_validator


class GroupKind(str, Enum):
    U = "U"
    SO = "SO"
    SOMINUS = "SOminus"
    O = "O"
    SP = "Sp"


class Group(BaseModel):
    kind: GroupKind
    n: int = Field(..., ge=0, description="Matrix size; for Sp the matrix is 2n x 2n")
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _size(self) -> "Group":
        if self.n == 0 and self.kind != GroupKind.SO:
            raise ValueError("only SO(0) may have size 0")
        return self

    @property
    def matrix_size(self) -> int:
        return 2 * self.n if self.kind == GroupKind.SP else self.n

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.matrix_size})"


class EnsembleSample(BaseModel):
    group: Group
    component: GroupKind = Field(..., description="Resolved component; differs from group.kind only for O")
    angles: Any = Field(..., description="Sorted nontrivial angles in [0, pi]; for U the full list in [0, 2pi)")
    fixed: List[int] = Field(default=[], description="Fixed eigenvalues, each +1 or -1")
    model_config = ConfigDict(arbitrary_types_allowed=True)

    @property
    def is_unitary(self) -> bool:
        return self.component == GroupKind.U


class MetropolisRun(BaseModel):
    group: Group
    samples: List[EnsembleSample]
    acceptance_rate: float
    model_config = ConfigDict(arbitrary_types_allowed=True)


class TraceMomentQuery(BaseModel):
    a: List[int] = Field(default=[], description="a[k-1] is the power of Tr U^k")
    b: List[int] = Field(default=[], description="b[k-1] is the power of conj Tr U^k")
    n: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _non_negative(self) -> "TraceMomentQuery":
        if any(x < 0 for x in self.a + self.b):
            raise ValueError("exponents must be non-negative")
        return self
