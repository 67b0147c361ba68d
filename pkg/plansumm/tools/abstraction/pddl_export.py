# plansumm/tools/abstraction/pddl_export.py

"""PDDL-subset rendering of planning operators."""

from __future__ import annotations

from functools import singledispatch
from typing import Dict, Iterable, List

from plansumm.core.logic import And, Atom, Lit, Literal, Neq, Or, Truth, formula_literals, render

from .models import AbstractOperator

REQUIREMENTS = ":strips :negative-preconditions :disjunctive-preconditions :equality"


@singledispatch
def pddl(value) -> str:
    return render(value)


@pddl.register
def _(value: Truth) -> str:
    return "(and)" if value.value else "(or)"


@pddl.register
def _(value: Lit) -> str:
    return render(value.literal)


@pddl.register
def _(value: Neq) -> str:
    return f"(not (= {render(value.left)} {render(value.right)}))"


@pddl.register
def _(value: And) -> str:
    return "(and " + " ".join(pddl(i) for i in value.items) + ")"


@pddl.register
def _(value: Or) -> str:
    return "(or " + " ".join(pddl(i) for i in value.items) + ")"


def _effect(literals: Iterable[Literal]) -> str:
    rendered = sorted(render(l) for l in literals)
    return "(and " + " ".join(rendered) + ")" if rendered else "(and)"


def _predicates(operators: Iterable[AbstractOperator]) -> List[str]:
    arities: Dict[str, int] = {}
    for op in operators:
        for lit in list(op.post) + _formula_atoms(op.pre):
            atom = lit.atom if isinstance(lit, Literal) else lit
            arities.setdefault(atom.predicate, atom.arity)
    return [
        "(" + " ".join([name] + [f"?a{i}" for i in range(1, arities[name] + 1)]) + ")"
        for name in sorted(arities)
    ]


def _formula_atoms(formula) -> List[Atom]:
    return [l.atom for l in formula_literals(formula)]


def export_pddl_like(operators: Iterable[AbstractOperator], domain_name: str = "plansumm") -> str:
    """Deterministic domain text: primitive operators first, then abstract,
    each group by name."""
    ordered = sorted(operators, key=lambda op: (op.is_abstract, op.name))
    lines = [f"(define (domain {domain_name})", f"  (:requirements {REQUIREMENTS})"]
    predicates = _predicates(ordered)
    if predicates:
        lines.append("  (:predicates " + " ".join(predicates) + ")")
    for op in ordered:
        lines.append("")
        if op.is_abstract:
            lines.append("  ;; abstract")
        lines.append(f"  (:action {op.name}")
        lines.append("    :parameters (" + " ".join(render(v) for v in op.params) + ")")
        lines.append(f"    :precondition {pddl(op.pre)}")
        lines.append(f"    :effect {_effect(op.post)})")
    lines.append(")")
    return "\n".join(lines) + "\n"
