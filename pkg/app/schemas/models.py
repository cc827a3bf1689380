from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ModelKind(str, Enum):
    TCP_VARIABLE = "tcp-variable"
    TCP_CONSTANT = "tcp-constant"
    STORAGE = "storage"


_REQUIRED = {
    ModelKind.TCP_VARIABLE: set(),
    ModelKind.TCP_CONSTANT: {"lam"},
    ModelKind.STORAGE: {"alpha", "beta"},
}


class ModelSpec(BaseModel):
    """One of the three PDMPs together with its rates.

    tcp-variable jumps at rate x and halves, tcp-constant jumps at rate
    `lambda` and halves, storage decays at rate `beta` and receives Exp(1)
    increments at rate `alpha`.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    kind: ModelKind
    lam: Optional[float] = Field(default=None, alias="lambda", gt=0)
    alpha: Optional[float] = Field(default=None, gt=0)
    beta: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_parameters(self) -> "ModelSpec":
        required = _REQUIRED[self.kind]
        for name in ("lam", "alpha", "beta"):
            value = getattr(self, name)
            label = "lambda" if name == "lam" else name
            if name in required and value is None:
                raise ValueError(f"{self.kind.value} requires {label}")
            if name not in required and value is not None:
                raise ValueError(f"{label} is not a parameter of {self.kind.value}")
        return self

    @property
    def is_tcp(self) -> bool:
        return self.kind is not ModelKind.STORAGE

    @classmethod
    def tcp_variable(cls) -> "ModelSpec":
        return cls(kind=ModelKind.TCP_VARIABLE)

    @classmethod
    def tcp_constant(cls, lam: float) -> "ModelSpec":
        return cls(kind=ModelKind.TCP_CONSTANT, lam=lam)

    @classmethod
    def storage(cls, alpha: float, beta: float) -> "ModelSpec":
        return cls(kind=ModelKind.STORAGE, alpha=alpha, beta=beta)
