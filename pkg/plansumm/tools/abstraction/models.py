# plansumm/tools/abstraction/models.py

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, ClassVar, Dict, FrozenSet, Optional, Tuple, Union

from plansumm.core.logic import EMPTY, TRUE, Atom, BeliefBase, Formula, Literal, Substitution, Variable, render
from plansumm.core.unify import apply, variable_names
from plansumm.tools.oracle import ExecutionOutcome
from plansumm.tools.plandsl.models import Act, Event, EventType

from .abstraction_config import DEFAULTS


@dataclass(frozen=True)
class PlanningBounds:
    max_plan_length: int = DEFAULTS["max_plan_length"]
    max_expanded_states: int = DEFAULTS["max_expanded_states"]
    max_attempts: int = DEFAULTS["max_attempts"]

    def __post_init__(self):
        if self.max_plan_length < 0:
            raise ValueError("max_plan_length must not be negative")
        if self.max_expanded_states <= 0 or self.max_attempts <= 0:
            raise ValueError("max_expanded_states and max_attempts must be positive")

    @classmethod
    def from_config(cls, settings: Dict[str, Any]) -> "PlanningBounds":
        return cls(**{k: int(settings[k]) for k in DEFAULTS if k in settings})


@dataclass(frozen=True)
class AbstractOperator:
    """A planning operator. Abstract operators come from event summaries
    (`event` is set); primitive ones from action rules."""

    name: str
    head: Atom
    params: Tuple[Variable, ...]
    pre: Formula = TRUE
    post: FrozenSet[Literal] = frozenset()
    event: Optional[EventType] = None
    rank: int = 0

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "post", frozenset(self.post))
        names = {v.name for v in self.params}
        loose = variable_names(tuple(self.post)) - names
        if loose:
            raise ValueError(f"operator {self.name}: effect variables outside parameters: {sorted(loose)}")

    @property
    def is_abstract(self) -> bool:
        return self.event is not None

    def step(self, binding: Substitution) -> Union[Act, Event]:
        atom = apply(binding, self.head)
        return Event(atom) if self.is_abstract else Act(atom)


@dataclass(frozen=True)
class PlanStep:
    operator: str
    step: Union[Act, Event]
    binding: Substitution = EMPTY
    abstract: bool = False

    def to_json(self) -> Dict[str, Any]:
        return {
            "operator": self.operator,
            "step": render(self.step),
            "binding": render(self.binding),
            "abstract": self.abstract,
        }


@render.register
def _(value: PlanStep) -> str:
    return render(value.step)


@dataclass(frozen=True)
class GroundPlan:
    steps: Tuple[PlanStep, ...] = ()
    initial_state: Optional[BeliefBase] = None

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    @property
    def program(self) -> Tuple[Union[Act, Event], ...]:
        return tuple(s.step for s in self.steps)

    @property
    def key(self) -> Tuple[Union[Act, Event], ...]:
        """Identity used by the exclusion set."""
        return self.program

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> Dict[str, Any]:
        return {"steps": [s.to_json() for s in self.steps]}


# --- Verdicts ---


@dataclass(frozen=True)
class Witness:
    """Precondition literal of step `step` possibly undone by `undoing_literal`
    of step `undoing_step`. Steps count from 1."""

    literal: Literal
    step: int
    undoing_step: int
    undoing_literal: Literal
    theta: Substitution
    disjunctive: bool = False

    def to_json(self) -> Dict[str, Any]:
        return {
            "literal": render(self.literal),
            "step": self.step,
            "undoing_step": self.undoing_step,
            "undoing_literal": render(self.undoing_literal),
            "theta": render(self.theta),
            "disjunctive": self.disjunctive,
        }


@dataclass(frozen=True)
class Correct:
    outcome: Optional[ExecutionOutcome] = None
    label: ClassVar[str] = "correct"

    def to_json(self) -> Dict[str, Any]:
        report: Dict[str, Any] = {"verdict": self.label, "witnesses": []}
        if self.outcome is not None:
            report["decomposition"] = self.outcome.to_json()
        return report


@dataclass(frozen=True)
class PotentiallyIncorrect:
    witnesses: Tuple[Witness, ...]
    label: ClassVar[str] = "potentially_incorrect"

    def __post_init__(self):
        object.__setattr__(self, "witnesses", tuple(self.witnesses))
        if not self.witnesses:
            raise ValueError("a potentially incorrect verdict needs at least one witness")

    def to_json(self) -> Dict[str, Any]:
        return {"verdict": self.label, "witnesses": [w.to_json() for w in self.witnesses]}


@dataclass(frozen=True)
class DefinitelyIncorrect:
    witnesses: Tuple[Witness, ...] = ()
    label: ClassVar[str] = "definitely_incorrect"

    def to_json(self) -> Dict[str, Any]:
        return {"verdict": self.label, "witnesses": [w.to_json() for w in self.witnesses]}


Verdict = Union[Correct, PotentiallyIncorrect, DefinitelyIncorrect]


@dataclass(frozen=True)
class VerifiedPlan:
    plan: GroundPlan
    verdict: Verdict
    witness: Optional[ExecutionOutcome]
    attempts: int = 1
    excluded: Tuple[GroundPlan, ...] = ()

    def to_json(self) -> Dict[str, Any]:
        report = self.verdict.to_json()
        report.update(
            {
                "plan": [s.to_json() for s in self.plan.steps],
                "attempts": self.attempts,
                "excluded": [[render(s) for s in p.program] for p in self.excluded],
            }
        )
        if self.witness is not None:
            report["decomposition"] = self.witness.to_json()
        return report
