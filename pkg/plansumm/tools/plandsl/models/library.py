# plansumm/tools/plandsl/models/library.py

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, List, Optional, Tuple, Union

from plansumm.core.logic import TRUE, Atom, Formula, Literal, Variable, render
from plansumm.core.unify import apply, register_apply, register_variables, variables_of


@dataclass(frozen=True, order=True)
class EventType:
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"

    @classmethod
    def of(cls, atom: Atom) -> "EventType":
        return cls(atom.predicate, atom.arity)


# --- Steps ---


@dataclass(frozen=True)
class Act:
    atom: Atom


@dataclass(frozen=True)
class Event:
    atom: Atom

    @property
    def event_type(self) -> EventType:
        return EventType.of(self.atom)


@dataclass(frozen=True)
class AddBelief:
    atom: Atom


@dataclass(frozen=True)
class DelBelief:
    atom: Atom


@dataclass(frozen=True)
class Test:
    formula: Formula


Step = Union[Act, Event, AddBelief, DelBelief, Test]

_STEP_KEYWORDS = {Act: "act", Event: "event", AddBelief: "add", DelBelief: "del"}


@render.register(Act)
@render.register(Event)
@render.register(AddBelief)
@render.register(DelBelief)
def _(step) -> str:
    parts = [_STEP_KEYWORDS[type(step)], step.atom.predicate] + [render(a) for a in step.atom.args]
    return "(" + " ".join(parts) + ")"


@render.register(Test)
def _(step: Test) -> str:
    return f"(test {render(step.formula)})"


@register_apply(Act)
@register_apply(Event)
@register_apply(AddBelief)
@register_apply(DelBelief)
def _(step, subst):
    return type(step)(apply(subst, step.atom))


@register_apply(Test)
def _(step: Test, subst):
    return Test(apply(subst, step.formula))


def _extend(out: List[Variable], value) -> None:
    out.extend(v for v in variables_of(value) if v not in out)


@register_variables(Act)
@register_variables(Event)
@register_variables(AddBelief)
@register_variables(DelBelief)
def _(step, out: List[Variable]) -> None:
    _extend(out, step.atom)


@register_variables(Test)
def _(step: Test, out: List[Variable]) -> None:
    _extend(out, step.formula)


# --- Rules ---


@dataclass(frozen=True)
class PlanRule:
    rule_id: str
    head: Atom
    context: Formula = TRUE
    body: Tuple[Step, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))

    @property
    def event_type(self) -> EventType:
        return EventType.of(self.head)


@dataclass(frozen=True)
class ActionRule:
    head: Atom
    pre: Formula = TRUE
    add: FrozenSet[Atom] = frozenset()
    delete: FrozenSet[Atom] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "add", frozenset(self.add))
        object.__setattr__(self, "delete", frozenset(self.delete))

    @property
    def name(self) -> str:
        return self.head.predicate

    @property
    def key(self) -> Tuple[str, int]:
        return self.head.predicate, self.head.arity

    def postcondition(self) -> FrozenSet[Literal]:
        return frozenset(Literal(a) for a in self.add) | frozenset(Literal(a, False) for a in self.delete)


@register_variables(PlanRule)
def _(rule: PlanRule, out: List[Variable]) -> None:
    _extend(out, (rule.head, rule.context, rule.body))


# --- Libraries ---


@dataclass(frozen=True)
class PlanLibrary:
    rules: Tuple[PlanRule, ...] = ()
    declared: Tuple[EventType, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "declared", tuple(self.declared))

    @cached_property
    def event_types(self) -> Tuple[EventType, ...]:
        """Every event type the library declares, sorted."""
        found = set(self.declared)
        for rule in self.rules:
            found.add(rule.event_type)
            for step in rule.body:
                if isinstance(step, Event):
                    found.add(step.event_type)
        return tuple(sorted(found))

    @cached_property
    def _by_event(self) -> Dict[EventType, Tuple[PlanRule, ...]]:
        index: Dict[EventType, List[PlanRule]] = {}
        for rule in self.rules:
            index.setdefault(rule.event_type, []).append(rule)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def _by_id(self) -> Dict[str, PlanRule]:
        return {rule.rule_id: rule for rule in self.rules}

    def rules_for(self, event: EventType) -> Tuple[PlanRule, ...]:
        """Rules for `event` in library order."""
        return self._by_event.get(event, ())

    def rule(self, rule_id: str) -> Optional[PlanRule]:
        return self._by_id.get(rule_id)

    def __len__(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class ActionLibrary:
    rules: Tuple[ActionRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    @cached_property
    def _index(self) -> Dict[Tuple[str, int], ActionRule]:
        return {rule.key: rule for rule in self.rules}

    def lookup(self, name: str, arity: int) -> Optional[ActionRule]:
        return self._index.get((name, arity))

    def __len__(self) -> int:
        return len(self.rules)
