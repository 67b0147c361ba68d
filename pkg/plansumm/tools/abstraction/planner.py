# plansumm/tools/abstraction/planner.py

"""Breadth-first forward search over ground belief states."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import AbstractSet, Deque, FrozenSet, Iterable, List, Sequence, Set, Tuple

import structlog

from plansumm.core.errors import BoundsExceededError, NoPlanError, NonGroundFormulaError
from plansumm.core.logic import FALSE, Atom, BeliefBase, Constant, Formula, Substitution, render
from plansumm.core.beliefs import evaluate, is_satisfiable
from plansumm.core.unify import apply, is_ground

from .models import AbstractOperator, GroundPlan, PlanningBounds, PlanStep

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class GroundOperator:
    operator: AbstractOperator
    binding: Substitution
    pre: Formula
    add: FrozenSet[Atom]
    delete: FrozenSet[Atom]

    def applicable(self, state: BeliefBase) -> bool:
        return evaluate(state, self.pre)

    def successor(self, state: BeliefBase) -> BeliefBase:
        return state.updated(self.add, self.delete)

    def plan_step(self) -> PlanStep:
        op = self.operator
        return PlanStep(op.name, op.step(self.binding), self.binding, op.is_abstract)


def operator_order(op: AbstractOperator) -> Tuple[int, int, str]:
    """Abstract before primitive, higher rank first, then by name."""
    return (0 if op.is_abstract else 1, -op.rank, op.name)


def effects(op: AbstractOperator, binding: Substitution) -> Tuple[FrozenSet[Atom], FrozenSet[Atom]]:
    post = [apply(binding, lit) for lit in op.post]
    for lit in post:
        if not is_ground(lit):
            raise NonGroundFormulaError(f"effect of {op.name} is not ground: {render(lit)}")
    return (
        frozenset(l.atom for l in post if l.positive),
        frozenset(l.atom for l in post if not l.positive),
    )


def ground_operators(operators: Iterable[AbstractOperator], universe: Iterable[Constant]) -> List[GroundOperator]:
    """Every instance of every operator over `universe`, in search order.
    Operators whose precondition is `false` are never instantiated."""
    constants = tuple(sorted(set(universe)))
    ground: List[GroundOperator] = []
    for op in sorted(operators, key=operator_order):
        if op.pre == FALSE:
            continue
        names = [v.name for v in op.params]
        for values in itertools.product(constants, repeat=len(names)):
            binding = Substitution(zip(names, values))
            add, delete = effects(op, binding)
            ground.append(GroundOperator(op, binding, apply(binding, op.pre), add, delete))
    return ground


def _remaining(live: FrozenSet[Tuple], step) -> FrozenSet[Tuple]:
    """Suffixes of excluded plans still open after taking `step`."""
    return frozenset(rest[1:] for rest in live if rest and rest[0] == step)


def plan_classical(
    beliefs: BeliefBase,
    goal: Formula,
    operators: Iterable[AbstractOperator],
    universe: Iterable[Constant],
    bounds: PlanningBounds = PlanningBounds(),
    exclude: AbstractSet[Tuple] = frozenset(),
) -> GroundPlan:
    """Shortest plan reaching a state where `goal` holds, skipping plans whose
    step sequence is in `exclude`.

    A search node is a state together with the excluded plans its path is
    still a prefix of, so two paths into one state are merged only when
    they can be completed by the same steps."""
    universe = tuple(sorted(set(universe)))
    ground = ground_operators(operators, universe)
    start = (beliefs, frozenset(exclude))
    queue: Deque[Tuple[BeliefBase, FrozenSet[Tuple], Tuple[GroundOperator, ...]]] = deque([start + ((),)])
    seen: Set[Tuple[BeliefBase, FrozenSet[Tuple]]] = {start}
    expanded = 0
    while queue:
        state, live, path = queue.popleft()
        if () not in live and is_satisfiable(state, goal, universe):
            steps = tuple(g.plan_step() for g in path)
            logger.info("plan_found", length=len(steps), expanded=expanded, plan=" ".join(render(s) for s in steps))
            return GroundPlan(steps, beliefs)
        if len(path) >= bounds.max_plan_length:
            continue
        expanded += 1
        if expanded > bounds.max_expanded_states:
            raise BoundsExceededError(f"expanded more than {bounds.max_expanded_states} states")
        for g in ground:
            if not g.applicable(state):
                continue
            node = (g.successor(state), _remaining(live, g.operator.step(g.binding)) if live else live)
            if node in seen:
                continue
            seen.add(node)
            queue.append(node + (path + (g,),))
    raise NoPlanError(
        f"no plan of length <= {bounds.max_plan_length} reaches {render(goal)}"
        + (f" outside {len(exclude)} excluded plan(s)" if exclude else "")
    )


def simulate(plan: GroundPlan, operators: Sequence[AbstractOperator]) -> List[BeliefBase]:
    """Operator-level states before each step and after the last one."""
    if plan.initial_state is None:
        raise ValueError("plan has no initial state")
    index = {op.name: op for op in operators}
    states = [plan.initial_state]
    for ps in plan.steps:
        add, delete = effects(index[ps.operator], ps.binding)
        states.append(states[-1].updated(add, delete))
    return states
