from .models import (
    AbstractOperator, Correct, DefinitelyIncorrect, GroundPlan, PlanningBounds, PlanStep, PotentiallyIncorrect,
    Verdict, VerifiedPlan, Witness,
)
from .abstraction_core import (
    build_abstract_operators, build_operators, build_primitive_operators, classify_plan, execute_plan,
    ground_plan_from_steps, library_is_coherent, operator_name, plan_abstract_verified, resolve,
)
from .planner import ground_operators, plan_classical, simulate
from .pddl_export import export_pddl_like
