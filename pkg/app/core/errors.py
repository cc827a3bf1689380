"""Exception hierarchy shared by services and the command line.

Each error class carries the process exit code the CLI reports for it.
"""
from typing import Optional


class LabError(Exception):
    """Base class for every failure raised by the lab."""

    exit_code: int = 1


class UsageError(LabError, ValueError):
    """Violated precondition, invalid configuration or out-of-range argument."""

    exit_code = 1


class ScheduleInfeasibleError(UsageError):
    """The hybrid coupling schedule cannot satisfy one of its validity conditions."""

    def __init__(self, condition: str, detail: str):
        self.condition = condition
        super().__init__(f"infeasible schedule ({condition}): {detail}")


class NumericalFailureError(LabError):
    """Quadrature, rejection sampling or regression could not produce a trustworthy value."""

    exit_code = 2

    def __init__(self, message: str, replica: Optional[int] = None):
        self.replica = replica
        if replica is not None:
            message = f"{message} (replica {replica})"
        super().__init__(message)


class AcceptanceError(LabError):
    """A `--check` comparison against an acceptance threshold failed."""

    exit_code = 3

    def __init__(self, failures: list[str]):
        self.failures = failures
        super().__init__("acceptance check failed: " + "; ".join(failures))
