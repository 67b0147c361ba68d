# plansumm/tools/summarize/summarize_core.py

"""Bottom-up summarisation of plan libraries: rankings, postconditions,
mentioned literals, must/may undoing and the plan-body and event summaries."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import AbstractSet, Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple, Union

import structlog

from plansumm.core.errors import MissingSummaryError, RecursiveLibraryError, UnknownActionError
from plansumm.core.logic import (
    FALSE, Atom, Literal, Or, Substitution, Variable, complement, render,
)
from plansumm.core.unify import (
    apply, canonical_literals, match, mgu, rename_apart, rename_clashing, variable_names, variables_of,
)
from plansumm.tools.plandsl.models import (
    Act, ActionLibrary, AddBelief, DelBelief, Event, EventType, PlanLibrary, PlanRule, Step, Test,
)

from .models import EPSILON, Ranking, SummaryInfo, SummaryTable

logger = structlog.get_logger(__name__)

StepSummaries = Mapping[object, SummaryInfo]


@dataclass(frozen=True)
class UndoWitness:
    index: int
    literal: Literal
    theta: Substitution


# --- Ranking ---


def children(event: EventType, plans: PlanLibrary) -> FrozenSet[EventType]:
    found: Set[EventType] = set()
    for rule in plans.rules_for(event):
        for step in rule.body:
            if isinstance(step, Event):
                found.add(step.event_type)
    return frozenset(found)


def compute_ranking(plans: PlanLibrary) -> Ranking:
    """Leaves rank 0, every other event 1 + its highest-ranked child."""
    ranks: Dict[EventType, int] = {}
    on_path: Dict[EventType, int] = {}
    for root in plans.event_types:
        if root in ranks:
            continue
        path: List[EventType] = [root]
        pending: List[List[EventType]] = [sorted(children(root, plans))]
        on_path[root] = 0
        while path:
            if pending[-1]:
                child = pending[-1].pop(0)
                if child in on_path:
                    raise RecursiveLibraryError(path[on_path[child]:] + [child])
                if child in ranks:
                    continue
                on_path[child] = len(path)
                path.append(child)
                pending.append(sorted(children(child, plans)))
                continue
            done = path.pop()
            pending.pop()
            del on_path[done]
            ranks[done] = 1 + max((ranks[c] for c in children(done, plans)), default=-1)
    return Ranking(ranks)


# --- Postconditions and mentioned literals ---


def post(step: Step, actions: ActionLibrary) -> FrozenSet[Literal]:
    if isinstance(step, Test):
        return frozenset()
    if isinstance(step, AddBelief):
        return frozenset({Literal(step.atom, True)})
    if isinstance(step, DelBelief):
        return frozenset({Literal(step.atom, False)})
    if isinstance(step, Act):
        rule = actions.lookup(step.atom.predicate, step.atom.arity)
        if rule is None:
            raise UnknownActionError(f"no action rule for {render(step.atom)}")
        theta = match(rule.head, step.atom)
        return frozenset(apply(theta, lit) for lit in rule.postcondition())
    raise TypeError(f"post() is undefined for event steps: {render(step)}")


def canonical_head(event: EventType, plans: PlanLibrary) -> Atom:
    """Head of the first rule for `event`, or ?x1..?xn when it has none."""
    rules = plans.rules_for(event)
    if rules:
        return rules[0].head
    return Atom(event.name, tuple(Variable(f"x{i}") for i in range(1, event.arity + 1)))


def compute_mnt(
    program: Union[Sequence[Step], EventType],
    plans: PlanLibrary,
    actions: ActionLibrary,
    max_depth: Optional[int] = None,
) -> FrozenSet[Literal]:
    """Mentioned literals by recursive expansion, renaming rule-local variables
    apart at every expansion. Returns one literal per renaming class."""
    if isinstance(program, EventType):
        steps: Tuple[Step, ...] = (Event(canonical_head(program, plans)),)
    else:
        steps = tuple(program)
    limit = max_depth if max_depth is not None else len(plans.event_types) + 1
    used: Set[str] = set(variable_names(steps))
    protected = frozenset(used)
    found: List[Literal] = []

    def expand(body: Sequence[Step], path: Tuple[EventType, ...]) -> None:
        for step in body:
            if not isinstance(step, Event):
                found.extend(post(step, actions))
                continue
            event = step.event_type
            if len(path) >= limit or event in path:
                raise RecursiveLibraryError(list(path) + [event])
            for rule in plans.rules_for(event):
                renamed, _ = rename_apart((rule.head, rule.context, rule.body), used)
                used.update(variable_names(renamed))
                head, _, rule_body = renamed
                theta = match(head, step.atom)
                expand(apply(theta, rule_body), path + (event,))

    expand(steps, ())
    return canonical_literals(found, protected)


# --- Undoing ---


def _lookup(delta: StepSummaries, step) -> SummaryInfo:
    try:
        return delta[step]
    except KeyError:
        label = render(step) if not isinstance(step, str) else step
        raise MissingSummaryError(f"no summary for {label}") from None


def must_undone(lit: Literal, rest: Sequence[object], delta: StepSummaries) -> bool:
    target = complement(lit)
    for step in rest:
        if target in _lookup(delta, step).must:
            return True
    return False


def may_undone_witness(lit: Literal, rest: Sequence[object], delta: StepSummaries) -> Optional[UndoWitness]:
    """Earliest step (then smallest rendering) with a mentioned literal that
    unifies with the complement of `lit` once renamed apart from it."""
    avoid = variable_names(lit)
    for index, step in enumerate(rest):
        info = _lookup(delta, step)
        for other in sorted(info.mentioned | info.must, key=render):
            renamed, _ = rename_clashing(other, avoid)
            theta = mgu(lit, complement(renamed))
            if theta is not None:
                return UndoWitness(index, renamed, theta)
    return None


def may_undone(lit: Literal, rest: Sequence[object], delta: StepSummaries) -> bool:
    return may_undone_witness(lit, rest, delta) is not None


# --- Plan bodies ---


def instantiate_summary(info: SummaryInfo, occurrence: Atom, avoid: AbstractSet[str]) -> SummaryInfo:
    """Event-type summary specialised to one occurrence. Summary variables that
    clash with `avoid` are renamed first; variables the occurrence does not bind
    stay fresh."""
    parts = (info.params, info.must, info.mentioned)
    (params, must, mentioned), _ = rename_clashing(parts, set(avoid) | variable_names(occurrence))
    theta = mgu(Atom(occurrence.predicate, params), occurrence)
    if theta is None:
        raise MissingSummaryError(f"summary of {info.label} does not unify with {render(occurrence)}")
    return SummaryInfo(
        Event(occurrence),
        variables_of(occurrence),
        EPSILON,
        frozenset(apply(theta, l) for l in must),
        frozenset(apply(theta, l) for l in mentioned),
    )


def occurrence_summaries(
    body: Sequence[Step],
    table: SummaryTable,
    avoid: AbstractSet[str] = frozenset(),
) -> Dict[Step, SummaryInfo]:
    """Summaries of every atomic program in `body`, keyed by step."""
    local: Dict[Step, SummaryInfo] = {}
    introduced: Set[str] = set(avoid) | variable_names(tuple(body))
    for step in body:
        if step in local:
            continue
        if isinstance(step, Event):
            info = instantiate_summary(table[step.event_type], step.atom, introduced)
            introduced |= variable_names((info.must, info.mentioned))
            local[step] = info
        else:
            local[step] = table.primitive(step)
    return local


def summ_plan(
    body: Sequence[Step],
    plans: PlanLibrary,
    actions: ActionLibrary,
    table: SummaryTable,
    subject: Optional[str] = None,
    protected: AbstractSet[str] = frozenset(),
    params: Optional[Sequence[Variable]] = None,
) -> SummaryInfo:
    """Summary of one plan body from the summaries of its atomic programs.
    Variables in `protected` (and those of the body) are never merged when
    literals are reduced to one per renaming class."""
    steps = tuple(body)
    delta = occurrence_summaries(steps, table, protected)
    must: List[Literal] = []
    mentioned: List[Literal] = []
    for i, step in enumerate(steps):
        info = delta[step]
        rest = steps[i + 1:]
        for lit in sorted(info.must, key=render):
            if not may_undone(lit, rest, delta):
                must.append(lit)
        for lit in sorted(info.must | info.mentioned, key=render):
            if not must_undone(lit, rest, delta):
                mentioned.append(lit)
    keep = frozenset(protected) | variable_names(steps)
    must_set = canonical_literals(must, keep)
    return SummaryInfo(
        subject if subject is not None else _body_label(steps),
        tuple(params) if params is not None else variables_of(steps),
        EPSILON,
        must_set,
        canonical_literals(mentioned, keep, prefer=must_set),
    )


def _body_label(steps: Sequence[Step]) -> str:
    return " ".join(render(s) for s in steps)


def summ_rule(rule: PlanRule, plans: PlanLibrary, actions: ActionLibrary, table: SummaryTable) -> SummaryInfo:
    return summ_plan(rule.body, plans, actions, table, rule.rule_id, variable_names(rule), variables_of(rule.head))


# --- Events ---


def summ_event(event: EventType, plans: PlanLibrary, table: SummaryTable) -> SummaryInfo:
    """Precondition is the disjunction of the rule contexts; must literals are
    the head-only literals common to every rule; mentioned is the union."""
    head = canonical_head(event, plans)
    params = tuple(a for a in head.args if isinstance(a, Variable))
    rules = plans.rules_for(event)
    if not rules:
        return SummaryInfo(event, params, FALSE)
    head_names = frozenset(v.name for v in params)
    used: Set[str] = set(head_names)
    contexts = []
    musts: List[FrozenSet[Literal]] = []
    mentioned: Set[Literal] = set()
    for rule in rules:
        info = table.body(rule.rule_id)
        rule_head = variable_names(rule.head)
        parts = (rule.context, info.must, info.mentioned)
        local = variable_names(parts) - rule_head
        avoid = used | rule_head
        (context, must, mnt), _ = rename_apart(parts, avoid, preserve=rule_head | (local - avoid))
        used |= variable_names((context, must, mnt)) - rule_head
        theta = match(rule.head, head)
        contexts.append(apply(theta, context))
        musts.append(frozenset(apply(theta, l) for l in must))
        mentioned |= {apply(theta, l) for l in mnt}
    common = frozenset.intersection(*musts)
    must_set = frozenset(l for l in common if variable_names(l) <= head_names)
    precondition = contexts[0] if len(contexts) == 1 else Or(tuple(contexts))
    return SummaryInfo(
        event,
        params,
        precondition,
        must_set,
        canonical_literals(mentioned, head_names, prefer=must_set),
    )


# --- Driver ---


def primitive_steps(plans: PlanLibrary) -> Tuple[Step, ...]:
    seen: Dict[Step, None] = {}
    for rule in plans.rules:
        for step in rule.body:
            if not isinstance(step, Event):
                seen.setdefault(step, None)
    return tuple(sorted(seen, key=render))


def summ(plans: PlanLibrary, actions: ActionLibrary, workers: int = 1) -> SummaryTable:
    """Summaries of every event type, lowest rank first. `workers` > 1 runs the
    events of one rank concurrently; the result does not depend on it."""
    primitives: Dict[Step, SummaryInfo] = {}
    for step in primitive_steps(plans):
        effects = post(step, actions)
        primitives[step] = SummaryInfo(step, variables_of(step), EPSILON, effects, effects)
    ranking = compute_ranking(plans)
    events: Dict[EventType, SummaryInfo] = {}
    bodies: Dict[str, SummaryInfo] = {}

    def summarise(event: EventType, table: SummaryTable) -> Tuple[Dict[str, SummaryInfo], SummaryInfo]:
        rule_infos = {rule.rule_id: summ_rule(rule, plans, actions, table) for rule in plans.rules_for(event)}
        staged = SummaryTable(ranking, table.events, {**table.bodies, **rule_infos}, table.primitives)
        return rule_infos, summ_event(event, plans, staged)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for level in ranking.levels():
            level_events = ranking.events_at(level)
            table = SummaryTable(ranking, events, bodies, primitives)
            if pool is not None:
                results = list(pool.map(lambda e: summarise(e, table), level_events))
            else:
                results = [summarise(e, table) for e in level_events]
            for event, (rule_infos, info) in zip(level_events, results):
                bodies.update(rule_infos)
                events[event] = info
            logger.debug("rank_summarised", rank=level, events=len(level_events))
    finally:
        if pool is not None:
            pool.shutdown(wait=True)
    logger.info(
        "summaries_computed",
        events=len(events),
        bodies=len(bodies),
        primitives=len(primitives),
        max_rank=ranking.max_rank,
    )
    return SummaryTable(ranking, events, bodies, primitives)
