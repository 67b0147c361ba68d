# plansumm/tools/oracle/generators.py

"""Randomised and synthetic libraries for the property and scaling suites.

Every generator takes a numpy Generator so runs are reproducible from a seed."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from plansumm.core.logic import (
    TRUE, And, Atom, BeliefBase, Constant, Formula, Lit, Literal, Term, Variable,
)
from plansumm.tools.plandsl.models import (
    Act, ActionLibrary, ActionRule, AddBelief, DelBelief, Event, PlanLibrary, PlanRule, Step, Test,
)
from plansumm.tools.plandsl.plandsl_core import predicate_signature

HEAD_VAR = Variable("x")
CONTEXT_VAR = Variable("y")


@dataclass(frozen=True)
class RandomDomain:
    plans: PlanLibrary
    actions: ActionLibrary
    universe: Tuple[Constant, ...]


@dataclass(frozen=True)
class PlanningEpisode:
    domain: RandomDomain
    beliefs: BeliefBase
    goal: Formula


def _pick(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


def _chance(rng: np.random.Generator, p: float) -> bool:
    return bool(rng.random() < p)


class _Builder:
    def __init__(self, rng: np.random.Generator, predicates: int, constants: int):
        self.rng = rng
        self.arity: Dict[str, int] = {f"p{i}": int(rng.integers(2)) for i in range(predicates)}
        self.universe = tuple(Constant(f"c{i}") for i in range(constants))

    def atom(self, predicate: str, terms: Sequence[Term]) -> Atom:
        return Atom(predicate, tuple(_pick(self.rng, terms) for _ in range(self.arity[predicate])))

    def literal(self, terms: Sequence[Term]) -> Literal:
        return Literal(self.atom(_pick(self.rng, sorted(self.arity)), terms), _chance(self.rng, 0.6))

    def action(self, name: str) -> ActionRule:
        arity = int(self.rng.integers(2))
        head = Atom(name, (HEAD_VAR,) * arity)
        terms: List[Term] = list(head.args) + list(self.universe[:1])
        pre = TRUE if _chance(self.rng, 0.5) else Lit(self.literal(terms))
        predicates = [str(p) for p in self.rng.permutation(sorted(self.arity))]
        add = {self.atom(predicates[0], terms)}
        delete = {self.atom(predicates[1], terms)} if len(predicates) > 1 and _chance(self.rng, 0.5) else set()
        return ActionRule(head, pre, add, delete)


def random_library(
    rng: np.random.Generator,
    ranks: int = 3,
    predicates: int = 4,
    constants: int = 3,
    max_rules: int = 2,
    max_actions: int = 3,
    max_body: int = 3,
) -> RandomDomain:
    """Acyclic library with events on `ranks` levels. Each event of rank r > 0
    uses at least one event of rank r - 1 so the ranking is exact."""
    b = _Builder(rng, predicates, constants)
    actions = [b.action(f"a{i}") for i in range(1 + int(rng.integers(max_actions)))]
    levels: List[List[Atom]] = []
    rules: List[PlanRule] = []
    for rank in range(ranks):
        heads = [
            Atom(f"e{rank}_{i}", (HEAD_VAR,) * int(rng.integers(2)))
            for i in range(1 + int(rng.integers(2)))
        ]
        for head in heads:
            for _ in range(1 + int(rng.integers(max_rules))):
                rules.append(_random_rule(b, f"R{len(rules)}", head, actions, levels, max_body))
        levels.append(heads)
    return RandomDomain(PlanLibrary(tuple(rules)), ActionLibrary(tuple(actions)), b.universe)


def _random_rule(
    b: _Builder,
    rule_id: str,
    head: Atom,
    actions: Sequence[ActionRule],
    lower: List[List[Atom]],
    max_body: int,
) -> PlanRule:
    rng = b.rng
    terms: List[Term] = list(head.args) + list(b.universe[:1])
    context: Formula = TRUE
    if _chance(rng, 0.5):
        extra = [CONTEXT_VAR] if _chance(rng, 0.3) else []
        context = Lit(b.literal(terms + extra))
        if CONTEXT_VAR in context.literal.atom.args:
            terms.append(CONTEXT_VAR)
    body: List[Step] = []
    if lower:
        body.append(Event(_instance(b, _pick(rng, lower[-1]), terms)))
    for _ in range(int(rng.integers(0 if body else 1, max_body - len(body) + 1))):
        body.insert(int(rng.integers(len(body) + 1)), _random_step(b, actions, lower, terms))
    return PlanRule(rule_id, head, context, tuple(body))


def _instance(b: _Builder, head: Atom, terms: Sequence[Term]) -> Atom:
    return Atom(head.predicate, tuple(_pick(b.rng, terms) for _ in head.args))


def _random_step(b: _Builder, actions: Sequence[ActionRule], lower: List[List[Atom]], terms: Sequence[Term]) -> Step:
    kind = int(b.rng.integers(5 if lower else 4))
    if kind == 0:
        action = _pick(b.rng, actions)
        return Act(_instance(b, action.head, terms))
    if kind == 1:
        return AddBelief(b.atom(_pick(b.rng, sorted(b.arity)), terms))
    if kind == 2:
        return DelBelief(b.atom(_pick(b.rng, sorted(b.arity)), terms))
    if kind == 3:
        return Test(Lit(b.literal(terms)))
    level = _pick(b.rng, lower)
    return Event(_instance(b, _pick(b.rng, level), terms))


def chain_library(n: int) -> Tuple[PlanLibrary, ActionLibrary]:
    """n rules, each adding its own belief and delegating to the next event."""
    x = (HEAD_VAR,)
    rules = []
    for i in range(n):
        body: List[Step] = [AddBelief(Atom(f"p{i}", x))]
        if i + 1 < n:
            body.append(Event(Atom(f"e{i + 1}", x)))
        else:
            body.append(Act(Atom("finish", x)))
        rules.append(PlanRule(f"R{i}", Atom(f"e{i}", x), TRUE, tuple(body)))
    finish = ActionRule(Atom("finish", x), TRUE, {Atom("done", x)})
    return PlanLibrary(tuple(rules)), ActionLibrary((finish,))


def random_planning_episode(rng: np.random.Generator, **library_options) -> PlanningEpisode:
    """Random domain, random start beliefs over its predicates and a one- or
    two-literal ground goal."""
    domain = random_library(rng, **library_options)
    atoms = _ground_atoms(domain)
    facts = frozenset(a for a in atoms if _chance(rng, 0.3))
    goal_atoms = [atoms[int(i)] for i in rng.choice(len(atoms), size=min(len(atoms), 1 + int(rng.integers(2))), replace=False)]
    lits = [Lit(Literal(a, a not in facts or _chance(rng, 0.5))) for a in goal_atoms]
    goal = lits[0] if len(lits) == 1 else And(tuple(lits))
    return PlanningEpisode(domain, BeliefBase(facts), goal)


def _ground_atoms(domain: RandomDomain) -> List[Atom]:
    signature = predicate_signature(domain.plans, domain.actions)
    atoms = []
    for predicate in sorted(signature):
        if signature[predicate] == 0:
            atoms.append(Atom(predicate, ()))
        else:
            atoms.extend(Atom(predicate, (c,)) for c in domain.universe)
    return atoms


def fit_degree(sizes: Sequence[int], seconds: Sequence[float]) -> float:
    """Slope of log(runtime) against log(size): the empirical polynomial degree."""
    slope, _ = np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(np.asarray(seconds, dtype=float)), 1)
    return float(slope)


__all__ = [
    "RandomDomain", "PlanningEpisode", "random_library", "chain_library", "random_planning_episode", "fit_degree",
]
