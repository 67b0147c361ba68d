# plansumm/core/beliefs.py

"""Closed-world evaluation of formulas against belief bases."""

from __future__ import annotations

import itertools
from functools import singledispatch
from typing import Iterable, List, Optional, Sequence

from .errors import NonGroundFormulaError
from .logic import (
    EMPTY, And, BeliefBase, Constant, Eq, Formula, Lit, Neq, Or, Substitution, Truth, render,
)
from .unify import apply, compose, is_ground, variables_of


@singledispatch
def _holds(formula, beliefs: BeliefBase) -> bool:
    raise TypeError(f"not a formula: {type(formula).__name__}")


@_holds.register
def _(formula: Truth, beliefs: BeliefBase) -> bool:
    return formula.value


@_holds.register
def _(formula: Lit, beliefs: BeliefBase) -> bool:
    return beliefs.holds(formula.literal.atom) == formula.literal.positive


@_holds.register
def _(formula: Eq, beliefs: BeliefBase) -> bool:
    return formula.left == formula.right


@_holds.register
def _(formula: Neq, beliefs: BeliefBase) -> bool:
    return formula.left != formula.right


@_holds.register
def _(formula: And, beliefs: BeliefBase) -> bool:
    return all(_holds(item, beliefs) for item in formula.items)


@_holds.register
def _(formula: Or, beliefs: BeliefBase) -> bool:
    return any(_holds(item, beliefs) for item in formula.items)


def evaluate(beliefs: BeliefBase, formula: Formula, subst: Substitution = EMPTY) -> bool:
    grounded = apply(subst, formula)
    if not is_ground(grounded):
        raise NonGroundFormulaError(f"formula is not ground: {render(grounded)}")
    return _holds(grounded, beliefs)


def satisfying_groundings(
    beliefs: BeliefBase,
    formula: Formula,
    universe: Iterable[Constant],
    binding: Optional[Substitution] = None,
) -> List[Substitution]:
    """Ground substitutions over `universe` for the free variables of
    `formula` (after `binding`) that make it true, in lexicographic order.
    When `binding` is given the returned substitutions extend it."""
    base = binding or EMPTY
    target = apply(base, formula)
    names = sorted(v.name for v in variables_of(target))
    constants: Sequence[Constant] = sorted(set(universe))
    found: List[Substitution] = []
    if names and not constants:
        return found
    for values in itertools.product(constants, repeat=len(names)):
        candidate = Substitution(zip(names, values))
        if _holds(apply(candidate, target), beliefs):
            found.append(compose(base, candidate) if binding else candidate)
    return found


def is_satisfiable(beliefs: BeliefBase, formula: Formula, universe: Iterable[Constant]) -> bool:
    return bool(satisfying_groundings(beliefs, formula, universe))
