# plansumm/core/unify.py

"""Substitution application, unification, matching and variable renaming.

`apply` and `variables_of` are single-dispatch so that higher layers (plan
steps, rules) register their own structure and get the same treatment."""

from __future__ import annotations

import re
from functools import singledispatch
from typing import AbstractSet, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .logic import (
    And, Atom, Constant, Eq, Lit, Literal, Neq, Or, Substitution, Term, Truth,
    Variable, complement, render,
)

# --- apply ---


def _unsupported(value, subst):
    raise TypeError(f"cannot substitute into {type(value).__name__}")


_apply_value = singledispatch(_unsupported)
register_apply = _apply_value.register


def apply(subst: Substitution, value):
    """Simultaneous replacement of bound variables; unbound ones stay."""
    if not subst:
        return value
    return _apply_value(value, subst)


@register_apply(Variable)
def _(value: Variable, subst: Substitution):
    return subst.get(value.name, value)


@register_apply(Constant)
@register_apply(Truth)
def _(value, subst: Substitution):
    return value


@register_apply(Atom)
def _(value: Atom, subst: Substitution):
    return Atom(value.predicate, tuple(_apply_value(a, subst) for a in value.args))


@register_apply(Literal)
def _(value: Literal, subst: Substitution):
    return Literal(_apply_value(value.atom, subst), value.positive)


@register_apply(Lit)
def _(value: Lit, subst: Substitution):
    return Lit(_apply_value(value.literal, subst))


@register_apply(Eq)
def _(value: Eq, subst: Substitution):
    return Eq(_apply_value(value.left, subst), _apply_value(value.right, subst))


@register_apply(Neq)
def _(value: Neq, subst: Substitution):
    return Neq(_apply_value(value.left, subst), _apply_value(value.right, subst))


@register_apply(And)
def _(value: And, subst: Substitution):
    return And(tuple(_apply_value(i, subst) for i in value.items))


@register_apply(Or)
def _(value: Or, subst: Substitution):
    return Or(tuple(_apply_value(i, subst) for i in value.items))


@register_apply(tuple)
@register_apply(list)
def _(value, subst: Substitution):
    return type(value)(_apply_value(v, subst) for v in value)


@register_apply(frozenset)
@register_apply(set)
def _(value, subst: Substitution):
    return type(value)(_apply_value(v, subst) for v in value)


@register_apply(Substitution)
def _(value: Substitution, subst: Substitution):
    return Substitution({name: _apply_value(t, subst) for name, t in value.items()})


# --- variables_of ---


@singledispatch
def _collect(value, out: List[Variable]) -> None:
    raise TypeError(f"cannot collect variables of {type(value).__name__}")


register_variables = _collect.register


@register_variables(Variable)
def _(value: Variable, out: List[Variable]) -> None:
    if value not in out:
        out.append(value)


@register_variables(Constant)
@register_variables(Truth)
def _(value, out: List[Variable]) -> None:
    return None


@register_variables(Atom)
def _(value: Atom, out: List[Variable]) -> None:
    for a in value.args:
        _collect(a, out)


@register_variables(Literal)
def _(value: Literal, out: List[Variable]) -> None:
    _collect(value.atom, out)


@register_variables(Lit)
def _(value: Lit, out: List[Variable]) -> None:
    _collect(value.literal, out)


@register_variables(Eq)
@register_variables(Neq)
def _(value, out: List[Variable]) -> None:
    _collect(value.left, out)
    _collect(value.right, out)


@register_variables(And)
@register_variables(Or)
def _(value, out: List[Variable]) -> None:
    for item in value.items:
        _collect(item, out)


@register_variables(tuple)
@register_variables(list)
def _(value, out: List[Variable]) -> None:
    for item in value:
        _collect(item, out)


@register_variables(frozenset)
@register_variables(set)
def _(value, out: List[Variable]) -> None:
    for item in sorted(value, key=render):
        _collect(item, out)


def variables_of(value) -> Tuple[Variable, ...]:
    """Variables in first-occurrence order (sets are walked in rendering order)."""
    out: List[Variable] = []
    _collect(value, out)
    return tuple(out)


def variable_names(value) -> FrozenSet[str]:
    return frozenset(v.name for v in variables_of(value))


def is_ground(value) -> bool:
    return not variables_of(value)


# --- unification ---


def _as_atom(value: Union[Atom, Literal]) -> Tuple[Optional[bool], Atom]:
    if isinstance(value, Literal):
        return value.positive, value.atom
    return None, value


def unify_terms(pairs: Iterable[Tuple[Term, Term]]) -> Optional[Substitution]:
    """Union-find unification of flat term pairs. When two variables meet,
    the right-hand one becomes the representative."""
    parent: Dict[Variable, Term] = {}

    def find(t: Term) -> Term:
        root = t
        while isinstance(root, Variable) and root in parent:
            root = parent[root]
        while isinstance(t, Variable) and t in parent and parent[t] != root:
            parent[t], t = root, parent[t]
        return root

    for left, right in pairs:
        rl, rr = find(left), find(right)
        if rl == rr:
            continue
        if isinstance(rl, Variable):
            parent[rl] = rr
        elif isinstance(rr, Variable):
            parent[rr] = rl
        else:
            return None
    return Substitution({v.name: find(v) for v in parent})


def mgu(a: Union[Atom, Literal], b: Union[Atom, Literal]) -> Optional[Substitution]:
    """Most general unifier of two atoms (or two literals of the same sign)."""
    sign_a, atom_a = _as_atom(a)
    sign_b, atom_b = _as_atom(b)
    if sign_a != sign_b:
        return None
    if atom_a.predicate != atom_b.predicate or atom_a.arity != atom_b.arity:
        return None
    return unify_terms(zip(atom_a.args, atom_b.args))


def match(
    pattern: Union[Atom, Literal],
    target: Union[Atom, Literal],
    fixed: AbstractSet[str] = frozenset(),
) -> Optional[Substitution]:
    """One-way matching: bind variables of `pattern` only. Variables named in
    `fixed` are rigid and only match themselves."""
    sign_p, atom_p = _as_atom(pattern)
    sign_t, atom_t = _as_atom(target)
    if sign_p != sign_t:
        return None
    if atom_p.predicate != atom_t.predicate or atom_p.arity != atom_t.arity:
        return None
    bindings: Dict[str, Term] = {}
    for p, t in zip(atom_p.args, atom_t.args):
        if isinstance(p, Variable) and p.name not in fixed:
            bound = bindings.get(p.name)
            if bound is None:
                bindings[p.name] = t
            elif bound != t:
                return None
        elif p != t:
            return None
    return Substitution(bindings)


def compose(first: Substitution, second: Substitution) -> Substitution:
    """Substitution equivalent to applying `first` and then `second`."""
    combined: Dict[str, Term] = {name: apply(second, t) for name, t in first.items()}
    for name, t in second.items():
        combined.setdefault(name, t)
    return Substitution(combined)


# --- renaming ---

_TRAILING_DIGITS = re.compile(r"\d+$")


def fresh_name(name: str, taken: AbstractSet[str]) -> str:
    base = _TRAILING_DIGITS.sub("", name) or name
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"


def rename_apart(
    value,
    avoid: AbstractSet[str],
    preserve: AbstractSet[str] = frozenset(),
) -> Tuple[object, Substitution]:
    """Rename every variable of `value` outside `preserve` to a name that is
    in neither `avoid` nor `value`. The renaming is injective."""
    names = [v.name for v in variables_of(value)]
    taken = set(avoid) | set(names)
    bindings: Dict[str, Term] = {}
    for name in names:
        if name in preserve:
            continue
        new = fresh_name(name, taken)
        taken.add(new)
        bindings[name] = Variable(new)
    renaming = Substitution(bindings)
    return apply(renaming, value), renaming


def rename_clashing(value, avoid: AbstractSet[str]) -> Tuple[object, Substitution]:
    """Rename only the variables of `value` that also occur in `avoid`."""
    names = variable_names(value)
    return rename_apart(value, avoid, preserve=names - set(avoid))


# --- variants ---


def is_variant(a: Literal, b: Literal, protected: AbstractSet[str] = frozenset()) -> bool:
    """True when `a` and `b` differ only by an injective renaming of variables
    outside `protected`."""
    forward = match(a, b, fixed=protected)
    if forward is None or match(b, a, fixed=protected) is None:
        return False
    targets = list(forward.values())
    if not all(isinstance(t, Variable) and t.name not in protected for t in targets):
        return False
    return len(set(targets)) == len(targets)


def canonical_literals(
    literals: Iterable[Literal],
    protected: AbstractSet[str] = frozenset(),
    prefer: Iterable[Literal] = (),
) -> FrozenSet[Literal]:
    """One representative per renaming class, taking `prefer` members first
    and otherwise the smallest rendering."""
    pool = set(literals)
    preferred = sorted(set(prefer) & pool, key=render)
    ordered = preferred + sorted(pool - set(preferred), key=render)
    kept: Dict[Tuple[str, int, bool], List[Literal]] = {}
    for lit in ordered:
        bucket = kept.setdefault((lit.atom.predicate, lit.atom.arity, lit.positive), [])
        if not any(is_variant(lit, k, protected) for k in bucket):
            bucket.append(lit)
    return frozenset(lit for bucket in kept.values() for lit in bucket)


def contains_variant(literals: Iterable[Literal], lit: Literal, protected: AbstractSet[str] = frozenset()) -> bool:
    return any(is_variant(lit, other, protected) for other in literals)


def complementary_pair(literals: Sequence[Literal]) -> Optional[Tuple[Literal, Literal]]:
    pool = set(literals)
    for lit in sorted(pool, key=render):
        if lit.positive and complement(lit) in pool:
            return lit, complement(lit)
    return None


__all__ = [
    "apply", "register_apply", "variables_of", "register_variables", "variable_names", "is_ground",
    "unify_terms", "mgu", "match", "compose", "fresh_name", "rename_apart", "rename_clashing",
    "is_variant", "canonical_literals", "contains_variant", "complementary_pair",
]
