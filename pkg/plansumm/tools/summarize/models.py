# plansumm/tools/summarize/models.py

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Tuple, Union

from plansumm.core.errors import MissingSummaryError
from plansumm.core.logic import Formula, Literal, Variable, render
from plansumm.core.unify import variable_names
from plansumm.tools.plandsl.models import EventType, Step


class _Epsilon:
    """Precondition marker for subjects that are not event types."""

    _instance: Optional["_Epsilon"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EPSILON"

    def __reduce__(self):
        return (_Epsilon, ())


EPSILON = _Epsilon()


@render.register(_Epsilon)
def _(value: _Epsilon) -> str:
    return "epsilon"


Subject = Union[EventType, str, Step]


@dataclass(frozen=True)
class Ranking:
    ranks: Mapping[EventType, int]

    def __post_init__(self):
        object.__setattr__(self, "ranks", MappingProxyType(dict(self.ranks)))

    def __getitem__(self, event: EventType) -> int:
        return self.ranks[event]

    def __contains__(self, event) -> bool:
        return event in self.ranks

    def levels(self) -> Tuple[int, ...]:
        return tuple(sorted(set(self.ranks.values())))

    def events_at(self, level: int) -> Tuple[EventType, ...]:
        return tuple(sorted(e for e, r in self.ranks.items() if r == level))

    @property
    def max_rank(self) -> int:
        return max(self.ranks.values(), default=0)

    def __hash__(self) -> int:
        return hash(frozenset(self.ranks.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, Ranking):
            return dict(self.ranks) == dict(other.ranks)
        return NotImplemented


@dataclass(frozen=True)
class SummaryInfo:
    subject: Subject
    params: Tuple[Variable, ...]
    precondition: Union[Formula, _Epsilon]
    must: FrozenSet[Literal] = frozenset()
    mentioned: FrozenSet[Literal] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "must", frozenset(self.must))
        object.__setattr__(self, "mentioned", frozenset(self.mentioned))
        is_event = isinstance(self.subject, EventType)
        if is_event == (self.precondition is EPSILON):
            raise ValueError(f"precondition must be epsilon exactly for non-event subjects: {self.label}")
        if not self.must <= self.mentioned:
            missing = ", ".join(render(l) for l in sorted(self.must - self.mentioned, key=render))
            raise ValueError(f"must literals not mentioned for {self.label}: {missing}")
        if is_event:
            head = {v.name for v in self.params}
            for lit in self.must:
                if not variable_names(lit) <= head:
                    raise ValueError(f"must literal {render(lit)} of {self.label} has non-head variables")

    @property
    def is_event(self) -> bool:
        return isinstance(self.subject, EventType)

    @property
    def label(self) -> str:
        if isinstance(self.subject, (EventType, str)):
            return str(self.subject)
        return render(self.subject)

    @property
    def only_mentioned(self) -> FrozenSet[Literal]:
        return self.mentioned - self.must


@dataclass(frozen=True)
class SummaryTable:
    """Event summaries plus the plan-body and primitive entries computed on the way."""

    ranking: Ranking
    events: Mapping[EventType, SummaryInfo] = field(default_factory=dict)
    bodies: Mapping[str, SummaryInfo] = field(default_factory=dict)
    primitives: Mapping[Step, SummaryInfo] = field(default_factory=dict)

    def __post_init__(self):
        for name in ("events", "bodies", "primitives"):
            object.__setattr__(self, name, MappingProxyType(dict(getattr(self, name))))

    def __iter__(self) -> Iterator[SummaryInfo]:
        for event in sorted(self.events):
            yield self.events[event]

    def __len__(self) -> int:
        return len(self.events)

    def __getitem__(self, event: EventType) -> SummaryInfo:
        try:
            return self.events[event]
        except KeyError:
            raise MissingSummaryError(f"no summary for event {event}") from None

    def __contains__(self, event) -> bool:
        return event in self.events

    def body(self, rule_id: str) -> SummaryInfo:
        try:
            return self.bodies[rule_id]
        except KeyError:
            raise MissingSummaryError(f"no summary for plan body {rule_id}") from None

    def primitive(self, step: Step) -> SummaryInfo:
        try:
            return self.primitives[step]
        except KeyError:
            raise MissingSummaryError(f"no summary for step {render(step)}") from None

    def find(self, name: str) -> Optional[SummaryInfo]:
        """Event entry by `name/arity` or by bare name when unambiguous."""
        matches = [info for event, info in self.events.items() if str(event) == name or event.name == name]
        return matches[0] if len(matches) == 1 else None

    def __hash__(self) -> int:
        return hash((self.ranking, frozenset(self.events.items())))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SummaryTable):
            return NotImplemented
        return (
            self.ranking == other.ranking
            and dict(self.events) == dict(other.events)
            and dict(self.bodies) == dict(other.bodies)
            and dict(self.primitives) == dict(other.primitives)
        )
