from .models import (
    Act, ActionLibrary, ActionRule, AddBelief, DelBelief, Event, EventType, PlanLibrary, PlanRule, Step, Test,
)
from .plandsl_core import (
    check_action_coherence, check_library_coherence, link_libraries, parse_action_library, parse_belief_base,
    parse_domain, parse_formula, parse_literal, parse_plan, parse_plan_library, parse_steps, predicate_signature,
    render_action_library, render_belief_base, render_plan_library, render_steps,
)
