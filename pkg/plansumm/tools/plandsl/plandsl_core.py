# plansumm/tools/plandsl/plandsl_core.py

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import structlog

from plansumm.core.errors import DslSyntaxError, ValidationError, Violation
from plansumm.core.logic import (
    FALSE, TRUE, And, Atom, BeliefBase, Constant, Eq, Formula, Lit, Literal, Neq, Or, Term, Variable,
    complement, conjuncts, formula_literals, render, term,
)
from plansumm.core.unify import apply, is_ground, mgu, variable_names, variables_of

from .models import (
    Act, ActionLibrary, ActionRule, AddBelief, DelBelief, Event, EventType, PlanLibrary, PlanRule, Step, Test,
)
from .utils.sexp import Node, SList, Symbol, read_all, syntax_error

logger = structlog.get_logger(__name__)

_FORMULA_KEYWORDS = {"and", "or", "not", "=", "!=", "true", "false"}
_STEP_BUILDERS = {"act": Act, "event": Event, "add": AddBelief, "del": DelBelief}

# --- Terms, atoms, formulas ---


def _name(node: Node, what: str) -> str:
    if not isinstance(node, Symbol) or node.startswith("?") or node in _FORMULA_KEYWORDS:
        raise syntax_error(node, what)
    return str(node)


def _term(node: Node) -> Term:
    if not isinstance(node, Symbol) or node == "?":
        raise syntax_error(node, "a term (?var or constant)")
    return term(str(node))


def _atom_from(node: SList, start: int = 0) -> Atom:
    if len(node) <= start:
        raise syntax_error(node, "a predicate name")
    name = _name(node[start], "a predicate name")
    return Atom(name, tuple(_term(n) for n in node.items[start + 1:]))


def _atom(node: Node) -> Atom:
    if not isinstance(node, SList):
        raise syntax_error(node, "an atom (pred term*)")
    return _atom_from(node)


def _formula(node: Node) -> Formula:
    if isinstance(node, Symbol):
        if node == "true":
            return TRUE
        if node == "false":
            return FALSE
        raise syntax_error(node, "a formula")
    head = node.head
    if head == "not":
        if len(node) != 2:
            raise syntax_error(node, "(not atom)")
        return Lit(Literal(_atom(node[1]), False))
    if head in ("=", "!="):
        if len(node) != 3:
            raise syntax_error(node, f"({head} term term)")
        cls = Eq if head == "=" else Neq
        return cls(_term(node[1]), _term(node[2]))
    if head in ("and", "or"):
        if len(node) < 2:
            raise syntax_error(node, f"({head} formula+)")
        items = tuple(_formula(n) for n in node.items[1:])
        return And(items) if head == "and" else Or(items)
    return Lit(Literal(_atom(node), True))


def _literal(node: Node) -> Literal:
    formula = _formula(node)
    if not isinstance(formula, Lit):
        raise syntax_error(node, "a literal")
    return formula.literal


def _step(node: Node) -> Step:
    if not isinstance(node, SList) or not node.head:
        raise syntax_error(node, "a step")
    head = node.head
    if head == "test":
        if len(node) != 2:
            raise syntax_error(node, "(test formula)")
        return Test(_formula(node[1]))
    if head in _STEP_BUILDERS:
        return _STEP_BUILDERS[head](_atom_from(node, 1))
    if head.startswith("!") and len(head) > 1 and head != "!=":
        name = head[1:]
        return Event(Atom(name, tuple(_term(n) for n in node.items[1:])))
    raise syntax_error(node, "(act|event|add|del NAME term*), (test formula) or (!NAME term*)")


def _section(node: Node, keyword: str) -> SList:
    if not isinstance(node, SList) or node.head != keyword:
        raise syntax_error(node, f"({keyword} ...)")
    return node


def _read(text: str) -> List[Node]:
    return read_all(text)


# --- Plan rules ---


def _plan_rule(node: SList, index: int) -> PlanRule:
    items = node.items[1:]
    label = f"R{index}"
    if items and isinstance(items[0], Symbol):
        label = _name(items[0], "a rule label")
        items = items[1:]
    if len(items) != 3:
        raise syntax_error(node, "(plan-rule [LABEL] (event ...) (context formula) (body step+))")
    event = _section(items[0], "event")
    head = _atom_from(event, 1)
    context = _section(items[1], "context")
    if len(context) != 2:
        raise syntax_error(context, "(context formula)")
    body = _section(items[2], "body")
    return PlanRule(label, head, _formula(context[1]), tuple(_step(n) for n in body.items[1:]))


def _declared_event(node: SList) -> EventType:
    if len(node) != 3 or not isinstance(node[2], Symbol) or not node[2].isdigit():
        raise syntax_error(node, "(declare-event NAME ARITY)")
    return EventType(_name(node[1], "an event name"), int(node[2]))


def _action_rule(node: SList) -> ActionRule:
    if len(node) != 5:
        raise syntax_error(node, "(action (NAME var*) (pre formula) (add atom*) (del atom*))")
    head = _atom(node[1])
    pre = _section(node[2], "pre")
    if len(pre) != 2:
        raise syntax_error(pre, "(pre formula)")
    add = _section(node[3], "add")
    delete = _section(node[4], "del")
    return ActionRule(
        head,
        _formula(pre[1]),
        frozenset(_atom(n) for n in add.items[1:]),
        frozenset(_atom(n) for n in delete.items[1:]),
    )


def parse_domain(text: str) -> Tuple[PlanLibrary, ActionLibrary]:
    """Parse a file that may mix plan rules, event declarations and action rules."""
    rules: List[PlanRule] = []
    declared: List[EventType] = []
    actions: List[ActionRule] = []
    for node in _read(text):
        if not isinstance(node, SList):
            raise syntax_error(node, "(plan-rule ...), (action ...) or (declare-event ...)")
        if node.head == "plan-rule":
            rules.append(_plan_rule(node, len(rules)))
        elif node.head == "action":
            actions.append(_action_rule(node))
        elif node.head == "declare-event":
            declared.append(_declared_event(node))
        else:
            raise syntax_error(node, "(plan-rule ...), (action ...) or (declare-event ...)")
    action_lib = ActionLibrary(tuple(actions))
    validate_action_library(action_lib)
    plan_lib = PlanLibrary(tuple(rules), tuple(declared))
    validate_plan_library(plan_lib, action_lib if actions else None)
    return plan_lib, action_lib


def parse_plan_library(text: str, actions: Optional[ActionLibrary] = None) -> PlanLibrary:
    plans, inline_actions = parse_domain(text)
    if actions is not None:
        validate_plan_library(plans, _merged(actions, inline_actions))
    return plans


def parse_action_library(text: str) -> ActionLibrary:
    plans, actions = parse_domain(text)
    if plans.rules or plans.declared:
        raise ValidationError("action-library", "plan rules are not allowed in an action library")
    return actions


def link_libraries(plans: PlanLibrary, actions: ActionLibrary) -> None:
    """Re-validate a plan library once its action library is known."""
    validate_plan_library(plans, actions)
    check_arities(plans, actions)


def _merged(a: ActionLibrary, b: ActionLibrary) -> ActionLibrary:
    return ActionLibrary(a.rules + b.rules)


# --- Validation ---


def _check_head(owner: str, head: Atom) -> None:
    seen: Set[str] = set()
    for arg in head.args:
        if not isinstance(arg, Variable):
            raise ValidationError(owner, f"head argument {render(arg)} is not a variable")
        if arg.name in seen:
            raise ValidationError(owner, f"duplicate head variable {render(arg)}")
        seen.add(arg.name)


def validate_plan_library(plans: PlanLibrary, actions: Optional[ActionLibrary] = None) -> None:
    declared = {rule.event_type for rule in plans.rules} | set(plans.declared)
    labels: Set[str] = set()
    for rule in plans.rules:
        if rule.rule_id in labels:
            raise ValidationError(rule.rule_id, "duplicate rule label")
        labels.add(rule.rule_id)
        _check_head(rule.rule_id, rule.head)
        if not rule.body:
            raise ValidationError(rule.rule_id, "plan body is empty")
        for step in rule.body:
            if isinstance(step, Event) and step.event_type not in declared:
                raise ValidationError(rule.rule_id, f"undeclared event {step.event_type}")
            if isinstance(step, Act) and actions is not None:
                if actions.lookup(step.atom.predicate, step.atom.arity) is None:
                    raise ValidationError(
                        rule.rule_id, f"undeclared action {step.atom.predicate}/{step.atom.arity}"
                    )
    check_arities(plans, actions)


def validate_action_library(actions: ActionLibrary) -> None:
    seen: Set[Tuple[str, int]] = set()
    for rule in actions.rules:
        owner = f"{rule.name}/{rule.head.arity}"
        if rule.key in seen:
            raise ValidationError(owner, "more than one action rule")
        seen.add(rule.key)
        _check_head(owner, rule.head)
        free = variable_names((rule.pre, rule.add, rule.delete)) - variable_names(rule.head)
        if free:
            names = ", ".join("?" + n for n in sorted(free))
            raise ValidationError(owner, f"variables {names} do not occur in the head")


def _belief_atoms(plans: Optional[PlanLibrary], actions: Optional[ActionLibrary]) -> Iterable[Tuple[str, Atom]]:
    if plans is not None:
        for rule in plans.rules:
            for lit in formula_literals(rule.context):
                yield rule.rule_id, lit.atom
            for step in rule.body:
                if isinstance(step, (AddBelief, DelBelief)):
                    yield rule.rule_id, step.atom
                elif isinstance(step, Test):
                    for lit in formula_literals(step.formula):
                        yield rule.rule_id, lit.atom
    if actions is not None:
        for rule in actions.rules:
            owner = f"{rule.name}/{rule.head.arity}"
            for lit in formula_literals(rule.pre):
                yield owner, lit.atom
            for atom in sorted(rule.add | rule.delete, key=render):
                yield owner, atom


def predicate_signature(
    plans: Optional[PlanLibrary] = None,
    actions: Optional[ActionLibrary] = None,
) -> Dict[str, int]:
    """Belief predicate name to arity over both libraries."""
    return check_arities(plans, actions)


def check_arities(plans: Optional[PlanLibrary], actions: Optional[ActionLibrary]) -> Dict[str, int]:
    arities: Dict[str, int] = {}
    for owner, atom in _belief_atoms(plans, actions):
        known = arities.setdefault(atom.predicate, atom.arity)
        if known != atom.arity:
            raise ValidationError(
                owner, f"arity clash for predicate {atom.predicate}: {known} vs {atom.arity}"
            )
    return arities


# --- Belief bases, plans, formulas ---


def parse_belief_base(text: str) -> Tuple[BeliefBase, Tuple[Constant, ...]]:
    """`(universe NAME+) (facts atom*)` to a belief base and its sorted universe."""
    nodes = _read(text)
    if len(nodes) != 2:
        raise DslSyntaxError(1, 1, "(universe NAME+) (facts atom*)")
    universe_node = _section(nodes[0], "universe")
    if len(universe_node) < 2:
        raise syntax_error(universe_node, "(universe NAME+)")
    universe = []
    for n in universe_node.items[1:]:
        universe.append(Constant(_name(n, "a constant name")))
    facts_node = _section(nodes[1], "facts")
    facts = [_atom(n) for n in facts_node.items[1:]]
    known = set(universe)
    for atom in facts:
        for arg in atom.args:
            if not isinstance(arg, Constant):
                raise ValidationError("beliefs", f"fact {render(atom)} is not ground")
            if arg not in known:
                raise ValidationError("beliefs", f"constant {arg} of {render(atom)} is not in the universe")
    return BeliefBase(frozenset(facts)), tuple(sorted(set(universe)))


def parse_plan(
    text: str,
    plans: Optional[PlanLibrary] = None,
    actions: Optional[ActionLibrary] = None,
) -> Tuple[Step, ...]:
    """A sequence of ground act/event steps."""
    steps = tuple(_step(n) for n in _read(text))
    for index, step in enumerate(steps, start=1):
        owner = f"plan step {index}"
        if not isinstance(step, (Act, Event)):
            raise ValidationError(owner, "plans contain only act and event steps")
        if not is_ground(step):
            raise ValidationError(owner, f"{render(step)} is not ground")
        if isinstance(step, Event) and plans is not None and step.event_type not in plans.event_types:
            raise ValidationError(owner, f"undeclared event {step.event_type}")
        if isinstance(step, Act) and actions is not None:
            if actions.lookup(step.atom.predicate, step.atom.arity) is None:
                raise ValidationError(owner, f"undeclared action {step.atom.predicate}/{step.atom.arity}")
    return steps


def parse_formula(text: str) -> Formula:
    nodes = _read(text)
    if len(nodes) != 1:
        raise DslSyntaxError(1, 1, "exactly one formula")
    return _formula(nodes[0])


def parse_literal(text: str) -> Literal:
    nodes = _read(text)
    if len(nodes) != 1:
        raise DslSyntaxError(1, 1, "exactly one literal")
    return _literal(nodes[0])


def parse_steps(text: str) -> Tuple[Step, ...]:
    return tuple(_step(n) for n in _read(text))


# --- Action coherence ---


def _trivially_inconsistent(pre: Formula) -> bool:
    parts = conjuncts(pre)
    if FALSE in parts:
        return True
    literals = {p.literal for p in parts if isinstance(p, Lit)}
    if any(complement(l) in literals for l in literals):
        return True
    for p in parts:
        if isinstance(p, Neq) and p.left == p.right:
            return True
        if isinstance(p, Eq) and isinstance(p.left, Constant) and isinstance(p.right, Constant):
            if p.left != p.right:
                return True
    return False


def check_action_coherence(rule: ActionRule) -> List[Violation]:
    """Conservative check that no ground instance both adds and deletes an atom
    while its precondition can hold."""
    violations: List[Violation] = []
    subject = f"{rule.name}/{rule.head.arity}"
    for deleted in sorted(rule.delete, key=render):
        for added in sorted(rule.add, key=render):
            theta = mgu(deleted, added)
            if theta is None:
                continue
            if _trivially_inconsistent(apply(theta, rule.pre)):
                continue
            violations.append(Violation(
                subject,
                f"{render(added)} is both added and deleted under {render(theta)}",
                {"add": render(added), "del": render(deleted), "theta": render(theta)},
            ))
    return violations


def check_library_coherence(actions: ActionLibrary) -> List[Violation]:
    found: List[Violation] = []
    for rule in actions.rules:
        found.extend(check_action_coherence(rule))
    if found:
        logger.warning("incoherent_actions", count=len(found))
    return found


# --- Rendering ---


def _indent(lines: Sequence[str], prefix: str = "  ") -> List[str]:
    return [prefix + line for line in lines]


def render_plan_rule(rule: PlanRule) -> str:
    head = " ".join([rule.head.predicate] + [render(a) for a in rule.head.args])
    lines = [
        f"(plan-rule {rule.rule_id}",
        f"  (event {head})",
        f"  (context {render(rule.context)})",
        "  (body",
    ]
    lines += _indent([render(s) for s in rule.body], "    ")
    lines[-1] += "))"
    return "\n".join(lines)


def render_action_rule(rule: ActionRule) -> str:
    add = " ".join(render(a) for a in sorted(rule.add, key=render))
    delete = " ".join(render(a) for a in sorted(rule.delete, key=render))
    return "\n".join([
        f"(action {render(rule.head)}",
        f"  (pre {render(rule.pre)})",
        f"  (add{' ' + add if add else ''})",
        f"  (del{' ' + delete if delete else ''}))",
    ])


def render_plan_library(plans: PlanLibrary) -> str:
    chunks = [f"(declare-event {e.name} {e.arity})" for e in plans.declared]
    chunks += [render_plan_rule(rule) for rule in plans.rules]
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def render_action_library(actions: ActionLibrary) -> str:
    chunks = [render_action_rule(rule) for rule in actions.rules]
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def render_belief_base(beliefs: BeliefBase, universe: Iterable[Constant]) -> str:
    names = " ".join(c.name for c in sorted(set(universe)))
    facts = " ".join(render(a) for a in beliefs)
    return f"(universe {names})\n(facts{' ' + facts if facts else ''})\n"


def render_steps(steps: Iterable[Step]) -> str:
    return " ".join(render(s) for s in steps)
