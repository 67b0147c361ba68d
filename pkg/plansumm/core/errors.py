# plansumm/core/errors.py

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Sequence


class PlanSummError(Exception):
    """Base class for every error raised by the toolkit."""


class DslSyntaxError(PlanSummError):
    def __init__(self, line: int, col: int, expected: str):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


class ValidationError(PlanSummError):
    def __init__(self, rule_id: str, invariant: str):
        self.rule_id = rule_id
        self.invariant = invariant
        super().__init__(f"{rule_id}: {invariant}")


class NonGroundFormulaError(PlanSummError):
    pass


class UnknownActionError(PlanSummError):
    pass


class MissingSummaryError(PlanSummError):
    pass


class RecursiveLibraryError(PlanSummError):
    """The children relation of a plan library has a cycle."""

    def __init__(self, cycle: Sequence[Any]):
        self.cycle = list(cycle)
        path = " -> ".join(str(e) for e in self.cycle)
        super().__init__(f"plan library is recursive: {path}")


class BoundsExceededError(PlanSummError):
    pass


class NoExecutionFoundError(PlanSummError):
    pass


class NoPlanError(PlanSummError):
    pass


class PreconditionViolationError(PlanSummError):
    pass


class UnsoundVerdictError(PlanSummError):
    """A plan classified correct over a coherent library has no successful execution."""

    def __init__(self, plan: Any, rendered: str):
        self.plan = plan
        super().__init__(f"plan classified correct has no successful execution: {rendered}")


@dataclass(frozen=True)
class Violation:
    subject: str
    message: str
    details: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def to_json(self) -> Dict[str, Any]:
        return {"subject": self.subject, "message": self.message, "details": self.details}
