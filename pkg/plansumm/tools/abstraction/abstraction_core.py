# plansumm/tools/abstraction/abstraction_core.py

"""Abstract operators from summaries, correctness of plans that use them, and
the plan / check / resolve loop."""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import structlog

from plansumm.core.errors import (
    BoundsExceededError, MissingSummaryError, PreconditionViolationError, UnknownActionError, UnsoundVerdictError,
)
from plansumm.core.logic import (
    Atom, BeliefBase, Constant, Formula, Literal, complement, disjuncts, formula_literals,
    render,
)
from plansumm.core.beliefs import evaluate, is_satisfiable, satisfying_groundings
from plansumm.core.unify import apply, is_ground, match, variables_of
from plansumm.tools.oracle import (
    ExecutionBounds, ExecutionOutcome, has_successful_execution, iter_executions, validate_coherence,
)
from plansumm.tools.plandsl import check_library_coherence
from plansumm.tools.plandsl.models import Act, ActionLibrary, Event, EventType, PlanLibrary
from plansumm.tools.summarize import (
    EPSILON, SummaryInfo, SummaryTable, UndoWitness, canonical_head, instantiate_summary, may_undone_witness,
    must_undone, post, summ,
)

from .models import (
    AbstractOperator, Correct, DefinitelyIncorrect, GroundPlan, PlanningBounds, PlanStep, PotentiallyIncorrect,
    Verdict, VerifiedPlan, Witness,
)
from .planner import effects, plan_classical, simulate

logger = structlog.get_logger(__name__)


# --- Operators ---


def operator_name(event: EventType) -> str:
    return f"{event.name}_{event.arity}"


def _params(head: Atom, pre: Formula) -> Tuple:
    params = list(variables_of(head))
    params += [v for v in variables_of(pre) if v not in params]
    return tuple(params)


def build_abstract_operators(table: SummaryTable, plans: Optional[PlanLibrary] = None) -> Tuple[AbstractOperator, ...]:
    """One operator per event summary: precondition as computed, effects the
    must literals. Extra precondition variables follow the head variables."""
    operators = []
    for info in table:
        event = info.subject
        if plans is not None:
            head = canonical_head(event, plans)
        elif len(info.params) == event.arity:
            head = Atom(event.name, info.params)
        else:
            raise MissingSummaryError(f"cannot rebuild the head of {event} without its plan library")
        operators.append(
            AbstractOperator(
                operator_name(event),
                head,
                _params(head, info.precondition),
                info.precondition,
                info.must,
                event,
                table.ranking[event],
            )
        )
    return tuple(operators)


def build_primitive_operators(actions: ActionLibrary) -> Tuple[AbstractOperator, ...]:
    return tuple(
        AbstractOperator(rule.name, rule.head, _params(rule.head, rule.pre), rule.pre, rule.postcondition())
        for rule in sorted(actions.rules, key=lambda r: r.key)
    )


def build_operators(
    table: SummaryTable, actions: ActionLibrary, plans: Optional[PlanLibrary] = None
) -> Tuple[AbstractOperator, ...]:
    return build_primitive_operators(actions) + build_abstract_operators(table, plans)


# --- Plans ---


def _operator_for(step: Union[Act, Event], index: Dict[str, AbstractOperator]) -> AbstractOperator:
    if isinstance(step, Event):
        op = index.get(operator_name(step.event_type))
        if op is None:
            raise MissingSummaryError(f"no abstract operator for {render(step)}")
        return op
    op = index.get(step.atom.predicate)
    if op is None or op.is_abstract or op.head.arity != step.atom.arity:
        raise UnknownActionError(f"no action rule for {render(step.atom)}")
    return op


def ground_plan_from_steps(
    steps: Sequence[Union[Act, Event]],
    operators: Sequence[AbstractOperator],
    beliefs: Optional[BeliefBase] = None,
    universe: Iterable[Constant] = (),
) -> GroundPlan:
    """Plan from ground act/event steps. With `beliefs`, extra precondition
    variables are bound to their first grounding that holds in the
    operator-level state."""
    index = {op.name: op for op in operators}
    universe = tuple(sorted(set(universe)))
    state = beliefs
    plan_steps = []
    for step in steps:
        op = _operator_for(step, index)
        binding = match(op.head, step.atom)
        if binding is None:
            raise MissingSummaryError(f"{render(step)} does not match operator {op.name}")
        if state is not None and len(binding) < len(op.params):
            options = satisfying_groundings(state, op.pre, universe, binding)
            if options:
                binding = options[0]
        if state is not None:
            add, delete = effects(op, binding)
            state = state.updated(add, delete)
        plan_steps.append(PlanStep(op.name, step, binding, op.is_abstract))
    return GroundPlan(tuple(plan_steps), beliefs)


def _step_summary(ps: PlanStep, table: SummaryTable, actions: ActionLibrary) -> SummaryInfo:
    if isinstance(ps.step, Event):
        return instantiate_summary(table[ps.step.event_type], ps.step.atom, frozenset())
    found = post(ps.step, actions)
    return SummaryInfo(ps.step, variables_of(ps.step), EPSILON, found, found)


def _unique(literals: Iterable[Literal]) -> List[Literal]:
    seen: Dict[Literal, None] = {}
    for lit in literals:
        seen.setdefault(lit, None)
    return list(seen)


def _may_hold(state: BeliefBase, formula: Formula) -> bool:
    return evaluate(state, formula) if is_ground(formula) else True


def _undoing_steps(lit: Literal, prefix: Sequence[PlanStep], delta) -> Iterator[UndoWitness]:
    """Every earlier step that may undo `lit`, earliest first."""
    for index, ps in enumerate(prefix):
        found = may_undone_witness(lit, (ps,), delta)
        if found is not None:
            yield UndoWitness(index, found.literal, found.theta)


def classify_plan(
    plan: GroundPlan,
    table: SummaryTable,
    actions: ActionLibrary,
    plans: Optional[PlanLibrary] = None,
) -> Verdict:
    """Correct, or PotentiallyIncorrect with every precondition literal that some
    earlier step may undo with nothing after it restoring the literal for
    certain. Each literal reports the earliest such step.

    This is stricter than checking only the earliest undoing step of a literal
    that is not certainly undone in the prefix. A literal an earlier step
    certainly undoes is flagged, and so is one undone again after it was
    restored."""
    operators = build_operators(table, actions, plans)
    index = {op.name: op for op in operators}
    delta = {ps: _step_summary(ps, table, actions) for ps in plan.steps}
    states = simulate(plan, operators) if plan.initial_state is not None else None
    witnesses: List[Witness] = []
    for i, ps in enumerate(plan.steps):
        pre = apply(ps.binding, _operator_for(ps.step, index).pre)
        options = disjuncts(pre)
        disjunctive = len(options) > 1
        if disjunctive and states is not None:
            options = [d for d in options if _may_hold(states[i], d)] or options
        prefix = plan.steps[:i]
        for lit in _unique(l for d in options for l in formula_literals(d)):
            # a step that must undo lit is also one that may undo it
            for found in _undoing_steps(lit, prefix, delta):
                between = prefix[found.index + 1:]
                if must_undone(lit, between, delta) or must_undone(complement(lit), between, delta):
                    continue
                witnesses.append(Witness(lit, i + 1, found.index + 1, found.literal, found.theta, disjunctive))
                break
    logger.info("plan_classified", steps=len(plan), witnesses=len(witnesses))
    return PotentiallyIncorrect(tuple(witnesses)) if witnesses else Correct()


def execute_plan(
    plan: GroundPlan,
    beliefs: BeliefBase,
    goal: Formula,
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
) -> Optional[ExecutionOutcome]:
    """First successful execution of the plan whose final beliefs satisfy `goal`."""
    universe = tuple(universe)
    for outcome in iter_executions(beliefs, plan.program, plans, actions, universe, bounds):
        if is_satisfiable(outcome.beliefs, goal, universe):
            return outcome
    return None


def resolve(
    plan: GroundPlan,
    beliefs: BeliefBase,
    goal: Formula,
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
    verdict: Optional[Verdict] = None,
) -> Verdict:
    """Settle a potentially incorrect plan by searching its decompositions."""
    if not isinstance(verdict, PotentiallyIncorrect):
        raise PreconditionViolationError("resolve needs a potentially incorrect verdict")
    outcome = execute_plan(plan, beliefs, goal, plans, actions, universe, bounds)
    if outcome is None:
        logger.info("plan_rejected", plan=" ".join(render(s) for s in plan.steps))
        return DefinitelyIncorrect(verdict.witnesses)
    return Correct(outcome)


def library_is_coherent(
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
) -> bool:
    """False when coherence cannot be established within `bounds`."""
    try:
        return not check_library_coherence(actions) and not validate_coherence(plans, actions, universe, bounds)
    except BoundsExceededError:
        logger.warning("coherence_unknown", max_belief_bases=bounds.max_belief_bases)
        return False


def plan_abstract_verified(
    beliefs: BeliefBase,
    goal: Formula,
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: PlanningBounds = PlanningBounds(),
    execution: ExecutionBounds = ExecutionBounds(),
    table: Optional[SummaryTable] = None,
) -> VerifiedPlan:
    """Plan with abstract and primitive operators, then check and resolve,
    excluding rejected plans until one is accepted.

    A plan classified correct that has no successful execution at all raises
    UnsoundVerdictError when the library is coherent. Over an incoherent
    library it is only excluded."""
    universe = tuple(sorted(set(universe)))
    if table is None:
        table = summ(plans, actions)
    operators = build_operators(table, actions, plans)
    excluded: List[GroundPlan] = []
    keys: Set[Tuple] = set()
    coherent: Optional[bool] = None
    for attempt in range(1, bounds.max_attempts + 1):
        plan = plan_classical(beliefs, goal, operators, universe, bounds, frozenset(keys))
        verdict = classify_plan(plan, table, actions, plans)
        if isinstance(verdict, PotentiallyIncorrect):
            verdict = resolve(plan, beliefs, goal, plans, actions, universe, execution, verdict)
            witness = verdict.outcome if isinstance(verdict, Correct) else None
        else:
            witness = execute_plan(plan, beliefs, goal, plans, actions, universe, execution)
            rendered = " ".join(render(s) for s in plan.steps)
            if witness is not None:
                verdict = Correct(witness)
            elif has_successful_execution(beliefs, plan.program, plans, actions, universe, execution) is None:
                if coherent is None:
                    coherent = library_is_coherent(plans, actions, universe, execution)
                if coherent:
                    raise UnsoundVerdictError(plan, rendered)
                logger.warning("correct_plan_without_execution", plan=rendered)
            else:
                logger.info("correct_plan_misses_goal", plan=rendered)
        if witness is not None:
            logger.info("plan_accepted", attempts=attempt, length=len(plan))
            return VerifiedPlan(plan, verdict, witness, attempt, tuple(excluded))
        excluded.append(plan)
        keys.add(plan.key)
    raise BoundsExceededError(f"no plan accepted after {bounds.max_attempts} attempts")
