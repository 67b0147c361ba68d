# plansumm/tools/oracle/oracle_core.py

"""Ground HTN execution by exhaustive enumeration.

Events try every rule whose head matches and every grounding of its context;
tests branch on every satisfying grounding; actions delete then add. Failure
recovery is never attempted, so an outcome is a plain successful execution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple, Union

import structlog

from plansumm.core.errors import (
    BoundsExceededError, NoExecutionFoundError, NonGroundFormulaError, UnknownActionError, Violation,
)
from plansumm.core.logic import (
    EMPTY, Atom, BeliefBase, Constant, Formula, Literal, Substitution, formula_literals, render,
)
from plansumm.core.beliefs import evaluate, satisfying_groundings
from plansumm.core.unify import apply, is_ground, match, variables_of
from plansumm.tools.plandsl.models import (
    Act, ActionLibrary, AddBelief, DelBelief, Event, EventType, PlanLibrary, Step, Test,
)
from plansumm.tools.plandsl.plandsl_core import predicate_signature
from plansumm.tools.summarize import SummaryTable, summ
from plansumm.tools.summarize.summarize_core import canonical_head

from .oracle_config import DEFAULTS

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ExecutionBounds:
    max_depth: int = DEFAULTS["max_depth"]
    max_outcomes: int = DEFAULTS["max_outcomes"]
    max_belief_bases: int = DEFAULTS["max_belief_bases"]

    def __post_init__(self):
        for name in ("max_depth", "max_outcomes", "max_belief_bases"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_config(cls, settings: Dict[str, Any]) -> "ExecutionBounds":
        return cls(**{k: int(settings[k]) for k in DEFAULTS if k in settings})


@dataclass(frozen=True)
class Configuration:
    beliefs: BeliefBase
    trace: Tuple[Atom, ...] = ()
    program: Tuple[Step, ...] = ()


# --- Decomposition tree ---


@dataclass(frozen=True)
class TestChoice:
    formula: Formula
    binding: Substitution

    def to_json(self) -> Dict[str, Any]:
        return {"test": render(self.formula), "binding": render(self.binding)}


@dataclass(frozen=True)
class EventChoice:
    event: Atom
    rule_id: str
    binding: Substitution
    children: Tuple[Union["EventChoice", TestChoice], ...] = ()

    def to_json(self) -> Dict[str, Any]:
        return {
            "event": render(self.event),
            "rule": self.rule_id,
            "binding": render(self.binding),
            "children": [c.to_json() for c in self.children],
        }


Choice = Union[EventChoice, TestChoice]


@dataclass(frozen=True)
class ExecutionOutcome:
    beliefs: BeliefBase
    trace: Tuple[Atom, ...] = ()
    tree: Tuple[Choice, ...] = field(default=())

    def to_json(self) -> Dict[str, Any]:
        return {
            "final": [render(a) for a in self.beliefs],
            "trace": [render(a) for a in self.trace],
            "tree": [c.to_json() for c in self.tree],
        }


# --- Enumeration ---


class _Run:
    def __init__(self, plans: PlanLibrary, actions: ActionLibrary, universe: Sequence[Constant], bounds: ExecutionBounds):
        self.plans = plans
        self.actions = actions
        self.universe = tuple(sorted(set(universe)))
        self.bounds = bounds

    def primitive(self, step: Step, config: Configuration) -> Optional[Configuration]:
        """Successor configuration after a ground primitive step, or None when
        the action precondition fails."""
        if not is_ground(step):
            raise NonGroundFormulaError(f"step is not ground when executed: {render(step)}")
        if isinstance(step, AddBelief):
            return Configuration(config.beliefs.updated(add=[step.atom]), config.trace)
        if isinstance(step, DelBelief):
            return Configuration(config.beliefs.updated(delete=[step.atom]), config.trace)
        rule = self.actions.lookup(step.atom.predicate, step.atom.arity)
        if rule is None:
            raise UnknownActionError(f"no action rule for {render(step.atom)}")
        theta = match(rule.head, step.atom)
        if not evaluate(config.beliefs, rule.pre, theta):
            return None
        beliefs = config.beliefs.updated(apply(theta, rule.add), apply(theta, rule.delete))
        return Configuration(beliefs, config.trace + (step.atom,))

    def sequence(self, config: Configuration, program: Tuple[Step, ...], depth: int) -> Iterator[Tuple[Configuration, Tuple[Choice, ...]]]:
        if not program:
            yield config, ()
            return
        step, rest = program[0], program[1:]
        for after, choices, binding in self.step(config, step, depth):
            remainder = apply(binding, rest) if binding else rest
            for final, more in self.sequence(after, remainder, depth):
                yield final, choices + more

    def step(self, config: Configuration, step: Step, depth: int) -> Iterator[Tuple[Configuration, Tuple[Choice, ...], Substitution]]:
        if isinstance(step, Test):
            for g in satisfying_groundings(config.beliefs, step.formula, self.universe):
                yield config, (TestChoice(step.formula, g),), g
            return
        if not isinstance(step, Event):
            after = self.primitive(step, config)
            if after is not None:
                yield after, (), EMPTY
            return
        if not is_ground(step.atom):
            raise NonGroundFormulaError(f"event is not ground when selected: {render(step.atom)}")
        if depth >= self.bounds.max_depth:
            raise BoundsExceededError(f"decomposition deeper than {self.bounds.max_depth} at {render(step.atom)}")
        for rule in self.plans.rules_for(step.event_type):
            theta = match(rule.head, step.atom)
            if theta is None:
                continue
            for g in satisfying_groundings(config.beliefs, rule.context, self.universe, theta):
                body = apply(g, rule.body)
                for final, choices in self.sequence(config, body, depth + 1):
                    context_binding = Substitution({k: v for k, v in g.items() if k not in theta})
                    yield final, (EventChoice(step.atom, rule.rule_id, context_binding, choices),), EMPTY


def iter_executions(
    beliefs: BeliefBase,
    program: Sequence[Step],
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
) -> Iterator[ExecutionOutcome]:
    """Successful executions in deterministic order: rules in library order,
    groundings in lexicographic order."""
    run = _Run(plans, actions, tuple(universe), bounds)
    count = 0
    for final, choices in run.sequence(Configuration(beliefs), tuple(program), 0):
        count += 1
        if count > bounds.max_outcomes:
            raise BoundsExceededError(f"more than {bounds.max_outcomes} successful executions")
        yield ExecutionOutcome(final.beliefs, final.trace, choices)


def enumerate_executions(
    beliefs: BeliefBase,
    program: Sequence[Step],
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
) -> List[ExecutionOutcome]:
    outcomes = list(iter_executions(beliefs, program, plans, actions, universe, bounds))
    logger.debug("executions_enumerated", program=" ".join(render(s) for s in program), outcomes=len(outcomes))
    return outcomes


def has_successful_execution(
    beliefs: BeliefBase,
    program: Sequence[Step],
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
) -> Optional[ExecutionOutcome]:
    return next(iter(iter_executions(beliefs, program, plans, actions, universe, bounds)), None)


# --- Replay ---


def replay(
    beliefs: BeliefBase,
    program: Sequence[Step],
    tree: Sequence[Choice],
    plans: PlanLibrary,
    actions: ActionLibrary,
) -> Tuple[BeliefBase, Tuple[Atom, ...]]:
    """Re-run `program` following the recorded choices."""
    run = _Run(plans, actions, (), ExecutionBounds())
    choices = iter(tree)
    final = _replay(run, Configuration(beliefs), tuple(program), choices)
    if next(choices, None) is not None:
        raise NoExecutionFoundError("decomposition tree has unused choices")
    return final.beliefs, final.trace


def _replay(run: _Run, config: Configuration, program: Tuple[Step, ...], choices: Iterator[Choice]) -> Configuration:
    steps = list(program)
    i = 0
    while i < len(steps):
        step = steps[i]
        if isinstance(step, Test):
            choice = next(choices, None)
            if not isinstance(choice, TestChoice) or not evaluate(config.beliefs, step.formula, choice.binding):
                raise NoExecutionFoundError(f"replay diverged at {render(step)}")
            steps[i + 1:] = apply(choice.binding, tuple(steps[i + 1:]))
        elif isinstance(step, Event):
            choice = next(choices, None)
            if not isinstance(choice, EventChoice) or choice.event != step.atom:
                raise NoExecutionFoundError(f"replay diverged at {render(step)}")
            rule = run.plans.rule(choice.rule_id)
            if rule is None:
                raise NoExecutionFoundError(f"unknown rule {choice.rule_id} in decomposition tree")
            theta = match(rule.head, step.atom)
            if theta is None:
                raise NoExecutionFoundError(f"rule {rule.rule_id} does not match {render(step.atom)}")
            binding = Substitution({**dict(theta), **dict(choice.binding)})
            if not evaluate(config.beliefs, rule.context, binding):
                raise NoExecutionFoundError(f"context of {rule.rule_id} fails during replay")
            inner = iter(choice.children)
            config = _replay(run, config, apply(binding, rule.body), inner)
            if next(inner, None) is not None:
                raise NoExecutionFoundError(f"unused choices below {rule.rule_id}")
        else:
            after = run.primitive(step, config)
            if after is None:
                raise NoExecutionFoundError(f"precondition of {render(step)} fails during replay")
            config = after
        i += 1
    return config


# --- Belief-base enumeration ---


def read_predicates(plans: PlanLibrary, actions: ActionLibrary) -> Dict[str, int]:
    """Predicates whose truth can change control flow: contexts, tests and
    action preconditions."""
    signature = predicate_signature(plans, actions)
    read: Set[str] = set()
    for rule in plans.rules:
        read |= {l.atom.predicate for l in formula_literals(rule.context)}
        for step in rule.body:
            if isinstance(step, Test):
                read |= {l.atom.predicate for l in formula_literals(step.formula)}
    for action in actions.rules:
        read |= {l.atom.predicate for l in formula_literals(action.pre)}
    return {p: signature[p] for p in sorted(read)}


def ground_atoms(signature: Dict[str, int], universe: Iterable[Constant]) -> Tuple[Atom, ...]:
    constants = tuple(sorted(set(universe)))
    atoms = []
    for predicate in sorted(signature):
        for args in itertools.product(constants, repeat=signature[predicate]):
            atoms.append(Atom(predicate, args))
    return tuple(atoms)


def candidate_belief_bases(
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
    signature: Optional[Dict[str, int]] = None,
) -> Iterator[BeliefBase]:
    """Every belief base over the ground atoms of `signature` (by default the
    read predicates), smallest first."""
    atoms = ground_atoms(signature if signature is not None else read_predicates(plans, actions), universe)
    if 2 ** len(atoms) > bounds.max_belief_bases:
        raise BoundsExceededError(
            f"{len(atoms)} ground atoms give more than {bounds.max_belief_bases} belief bases"
        )
    for size in range(len(atoms) + 1):
        for chosen in itertools.combinations(atoms, size):
            yield BeliefBase(frozenset(chosen))


# --- Checkers ---


def _literal_universe(signature: Dict[str, int], universe: Iterable[Constant]) -> Tuple[Atom, ...]:
    return ground_atoms(signature, universe)


def _true_literals(beliefs: BeliefBase, atoms: Iterable[Atom]) -> Set[Literal]:
    return {Literal(a, a in beliefs) for a in atoms}


def oracle_must_literals(
    event: Atom,
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
    start_bases: Optional[Iterable[BeliefBase]] = None,
) -> frozenset:
    """Ground literals true at the end of every successful execution of
    `event` from every start base."""
    universe = tuple(universe)
    atoms = _literal_universe(predicate_signature(plans, actions), universe)
    bases = list(start_bases) if start_bases is not None else list(candidate_belief_bases(plans, actions, universe, bounds))
    common: Optional[Set[Literal]] = None
    for base in bases:
        for outcome in iter_executions(base, (Event(event),), plans, actions, universe, bounds):
            found = _true_literals(outcome.beliefs, atoms)
            common = found if common is None else common & found
    if common is None:
        raise NoExecutionFoundError(f"no successful execution of {render(event)} from {len(bases)} belief base(s)")
    return frozenset(common)


def validate_coherence(
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
) -> List[Violation]:
    """One counterexample per rule whose applicable ground instance has no
    successful execution of its body."""
    universe = tuple(sorted(set(universe)))
    bases = list(candidate_belief_bases(plans, actions, universe, bounds))
    violations: List[Violation] = []
    for rule in plans.rules:
        found = _rule_counterexample(rule, plans, actions, universe, bounds, bases)
        if found is not None:
            violations.append(found)
    logger.info("coherence_checked", rules=len(plans.rules), belief_bases=len(bases), violations=len(violations))
    return violations


def _rule_counterexample(rule, plans, actions, universe, bounds, bases) -> Optional[Violation]:
    head_vars = variables_of(rule.head)
    for values in itertools.product(universe, repeat=len(head_vars)):
        theta = Substitution(zip((v.name for v in head_vars), values))
        for base in bases:
            for g in satisfying_groundings(base, rule.context, universe, theta):
                body = apply(g, rule.body)
                if has_successful_execution(base, body, plans, actions, universe, bounds) is None:
                    return Violation(
                        rule.rule_id,
                        "applicable rule instance has no successful execution of its body",
                        {
                            "event": render(apply(theta, rule.head)),
                            "binding": render(g),
                            "beliefs": [render(a) for a in base],
                        },
                    )
    return None


def oracle_captures(
    literals: Iterable[Literal],
    program: Sequence[Step],
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
    start_bases: Optional[Iterable[BeliefBase]] = None,
) -> bool:
    """Every literal made newly true by a successful execution of a ground
    instance of `program` is an instance of some member of `literals`."""
    return not capture_failures(literals, program, plans, actions, universe, bounds, start_bases)


def capture_failures(
    literals: Iterable[Literal],
    program: Sequence[Step],
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
    start_bases: Optional[Iterable[BeliefBase]] = None,
) -> List[Literal]:
    pool = tuple(literals)
    universe = tuple(sorted(set(universe)))
    program = tuple(program)
    bases = list(start_bases) if start_bases is not None else list(candidate_belief_bases(plans, actions, universe, bounds))
    names = [v.name for v in variables_of(program)]
    missed: Set[Literal] = set()
    for values in itertools.product(universe, repeat=len(names)):
        ground = apply(Substitution(zip(names, values)), program)
        for base in bases:
            for outcome in iter_executions(base, ground, plans, actions, universe, bounds):
                for lit in _new_literals(base, outcome.beliefs):
                    if not any(match(candidate, lit) is not None for candidate in pool):
                        missed.add(lit)
    return sorted(missed, key=render)


def _new_literals(before: BeliefBase, after: BeliefBase) -> List[Literal]:
    added = [Literal(a) for a in after.facts - before.facts]
    removed = [Literal(a, False) for a in before.facts - after.facts]
    return added + removed


def oracle_precondition_check(
    event: Atom,
    beliefs: BeliefBase,
    plans: PlanLibrary,
    actions: ActionLibrary,
    universe: Iterable[Constant],
    bounds: ExecutionBounds = ExecutionBounds(),
    table: Optional[SummaryTable] = None,
) -> Dict[str, bool]:
    """Whether `event` can succeed from `beliefs` and whether its computed
    precondition holds there for some grounding of the extra variables.
    `sound` is false only when an execution exists but the precondition fails."""
    universe = tuple(universe)
    event_type = EventType.of(event)
    if table is None:
        table = summ(plans, actions)
    info = table[event_type]
    theta = match(canonical_head(event_type, plans), event)
    executable = has_successful_execution(beliefs, (Event(event),), plans, actions, universe, bounds) is not None
    holds = theta is not None and bool(satisfying_groundings(beliefs, info.precondition, universe, theta))
    return {"executable": executable, "precondition_holds": holds, "sound": holds or not executable}
