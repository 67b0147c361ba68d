# plansumm/core/logic.py

"""Function-free first-order values: terms, atoms, literals, formulas,
substitutions and belief bases, plus their canonical s-expression rendering."""

from __future__ import annotations

from dataclasses import dataclass
from functools import singledispatch
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

# --- Terms ---


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable name must be nonempty")

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True, order=True)
class Constant:
    name: str

    def __post_init__(self):
        if not self.name or self.name.startswith("?"):
            raise ValueError(f"invalid constant name: {self.name!r}")

    def __str__(self) -> str:
        return self.name


Term = Union[Variable, Constant]


def term(text: str) -> Term:
    """`?x` becomes a Variable, anything else a Constant."""
    if text.startswith("?"):
        return Variable(text[1:])
    return Constant(text)


# --- Atoms and literals ---


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()

    def __post_init__(self):
        if not self.predicate:
            raise ValueError("predicate name must be nonempty")
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @classmethod
    def of(cls, predicate: str, *args: str) -> "Atom":
        return cls(predicate, tuple(term(a) for a in args))

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        return render(self)


def complement(lit: Literal) -> Literal:
    return Literal(lit.atom, not lit.positive)


def pos(predicate: str, *args: str) -> Literal:
    return Literal(Atom.of(predicate, *args), True)


def neg(predicate: str, *args: str) -> Literal:
    return Literal(Atom.of(predicate, *args), False)


# --- Formulas ---


@dataclass(frozen=True)
class Truth:
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class Lit:
    literal: Literal


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Neq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    items: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("and needs at least one operand")


@dataclass(frozen=True)
class Or:
    items: Tuple["Formula", ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("or needs at least one operand")


Formula = Union[Truth, Lit, Eq, Neq, And, Or]


def conjuncts(formula: Formula) -> Tuple[Formula, ...]:
    """Flattened top-level conjunction members."""
    if isinstance(formula, And):
        out = []
        for item in formula.items:
            out.extend(conjuncts(item))
        return tuple(out)
    if formula == TRUE:
        return ()
    return (formula,)


def disjuncts(formula: Formula) -> Tuple[Formula, ...]:
    if isinstance(formula, Or):
        return formula.items
    return (formula,)


def formula_literals(formula: Formula) -> Tuple[Literal, ...]:
    """Every literal occurring in the formula, in order of occurrence."""
    if isinstance(formula, Lit):
        return (formula.literal,)
    if isinstance(formula, (And, Or)):
        out = []
        for item in formula.items:
            for lit in formula_literals(item):
                if lit not in out:
                    out.append(lit)
        return tuple(out)
    return ()


# --- Substitutions ---


class Substitution(Mapping[str, Term]):
    """Finite map from variable names to terms. Identity bindings are dropped."""

    __slots__ = ("_map",)

    def __init__(self, bindings: Optional[Union[Mapping[str, Term], Iterable[Tuple[str, Term]]]] = None):
        items = dict(bindings or {})
        self._map = {
            name: value
            for name, value in sorted(items.items())
            if not (isinstance(value, Variable) and value.name == name)
        }

    def __getitem__(self, name: str) -> Term:
        return self._map[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self) -> int:
        return hash(frozenset(self._map.items()))

    def __eq__(self, other) -> bool:
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __lt__(self, other: "Substitution") -> bool:
        return self.sort_key() < other.sort_key()

    def sort_key(self) -> Tuple[Tuple[str, str], ...]:
        return tuple((name, str(value)) for name, value in self._map.items())

    def __repr__(self) -> str:
        return f"Substitution({render(self)})"


EMPTY = Substitution()


# --- Belief bases ---


@dataclass(frozen=True)
class BeliefBase:
    facts: frozenset = frozenset()

    def __post_init__(self):
        facts = frozenset(self.facts)
        for atom in facts:
            if any(isinstance(a, Variable) for a in atom.args):
                raise ValueError(f"belief atom is not ground: {render(atom)}")
        object.__setattr__(self, "facts", facts)

    def holds(self, atom: Atom) -> bool:
        return atom in self.facts

    def __contains__(self, atom) -> bool:
        return atom in self.facts

    def __iter__(self) -> Iterator[Atom]:
        return iter(sorted(self.facts, key=render))

    def __len__(self) -> int:
        return len(self.facts)

    def updated(self, add: Iterable[Atom] = (), delete: Iterable[Atom] = ()) -> "BeliefBase":
        """Delete first, then add."""
        return BeliefBase((self.facts - frozenset(delete)) | frozenset(add))

    def literals(self) -> Tuple[Literal, ...]:
        return tuple(Literal(a) for a in self)


# --- Canonical rendering ---


@singledispatch
def render(value) -> str:
    raise TypeError(f"cannot render {type(value).__name__}")


@render.register
def _(value: Variable) -> str:
    return f"?{value.name}"


@render.register
def _(value: Constant) -> str:
    return value.name


@render.register
def _(value: Atom) -> str:
    if not value.args:
        return f"({value.predicate})"
    return "(" + " ".join([value.predicate] + [render(a) for a in value.args]) + ")"


@render.register
def _(value: Literal) -> str:
    if value.positive:
        return render(value.atom)
    return f"(not {render(value.atom)})"


@render.register
def _(value: Truth) -> str:
    return "true" if value.value else "false"


@render.register
def _(value: Lit) -> str:
    return render(value.literal)


@render.register
def _(value: Eq) -> str:
    return f"(= {render(value.left)} {render(value.right)})"


@render.register
def _(value: Neq) -> str:
    return f"(!= {render(value.left)} {render(value.right)})"


@render.register
def _(value: And) -> str:
    return "(and " + " ".join(render(i) for i in value.items) + ")"


@render.register
def _(value: Or) -> str:
    return "(or " + " ".join(render(i) for i in value.items) + ")"


@render.register
def _(value: Substitution) -> str:
    return "{" + ", ".join(f"?{name}/{render(t)}" for name, t in value.items()) + "}"


@render.register
def _(value: BeliefBase) -> str:
    return " ".join(render(a) for a in value)


def sorted_literals(literals: Iterable[Literal]) -> Tuple[Literal, ...]:
    return tuple(sorted(set(literals), key=render))
