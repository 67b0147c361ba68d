# plansumm/core/__init__.py

from .errors import (
    BoundsExceededError, DslSyntaxError, MissingSummaryError, NoExecutionFoundError, NonGroundFormulaError,
    NoPlanError, PlanSummError, PreconditionViolationError, RecursiveLibraryError, UnknownActionError,
    UnsoundVerdictError, ValidationError, Violation,
)
from .logic import (
    EMPTY, FALSE, TRUE, And, Atom, BeliefBase, Constant, Eq, Formula, Lit, Literal, Neq, Or, Substitution,
    Term, Truth, Variable, complement, conjuncts, disjuncts, formula_literals, neg, pos, render,
    sorted_literals, term,
)
from .unify import (
    apply, canonical_literals, compose, is_ground, is_variant, match, mgu, rename_apart, rename_clashing,
    variable_names, variables_of,
)
from .beliefs import evaluate, is_satisfiable, satisfying_groundings
