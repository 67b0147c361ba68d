from .library import (
    Act, ActionLibrary, ActionRule, AddBelief, DelBelief, Event, EventType, PlanLibrary, PlanRule, Step, Test,
)
