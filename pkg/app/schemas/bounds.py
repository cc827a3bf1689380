from typing import Dict, Union

from pydantic import BaseModel, Field


class ContractionConstants(BaseModel):
    p: float
    M: float = Field(..., description="max of phi_p on [0, 1]")
    lam: float = Field(..., description="drift rate of the Lyapunov function")
    alpha: float = Field(..., description="bump height of psi")
    x0: float = Field(..., description="knee of psi")
    u_star: float = Field(..., description="argmax of phi_p")


class ScheduleParams(BaseModel):
    epsilon: float = Field(..., gt=0, lt=1)
    t1: float = Field(..., gt=0)
    t2: float = Field(..., gt=0)
    x0_cut: float = Field(..., gt=0)
    t0: float = Field(..., gt=0)

    @property
    def total(self) -> float:
        return self.t1 + self.t2


class BoundReport(BaseModel):
    bound_name: str
    inputs: Dict[str, Union[float, str]] = {}
    value: float
    raw_value: float
    clamped: bool = False


class DeviationBounds(BaseModel):
    finite_time: float
    stationary: float
    finite_time_valid: bool
    stationary_valid: bool
