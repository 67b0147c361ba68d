import pytest

from plansumm.core import (
    EMPTY, TRUE, Atom, BeliefBase, BoundsExceededError, Constant, Lit, MissingSummaryError, NoPlanError,
    PreconditionViolationError, Substitution, UnknownActionError, UnsoundVerdictError, Variable, neg, pos, render,
)
from plansumm.tools.abstraction import (
    AbstractOperator, Correct, DefinitelyIncorrect, GroundPlan, PlanningBounds, PotentiallyIncorrect, Witness,
    build_abstract_operators, build_operators, build_primitive_operators, classify_plan, execute_plan,
    export_pddl_like, ground_operators, ground_plan_from_steps, plan_abstract_verified, plan_classical, resolve,
    simulate,
)
from plansumm.tools.plandsl import Act, Event, parse_action_library, parse_formula, parse_plan, parse_plan_library
from plansumm.tools.plandsl.models import ActionLibrary
from plansumm.tools.summarize import summ

from conftest import load_beliefs, load_domain, read_fixture

A = Constant("a")
GOAL_R = Lit(pos("r"))


def _domain(plib, alib="empty.alib"):
    plans, actions = load_domain(plib, alib)
    return plans, actions, summ(plans, actions)


def _plan_from(name, plans, actions, table, beliefs=None, universe=()):
    steps = parse_plan(read_fixture(name), plans, actions)
    return ground_plan_from_steps(steps, build_operators(table, actions, plans), beliefs, universe)


@pytest.fixture(scope="module")
def clobber_domain():
    return _domain("clobber.plib")


@pytest.fixture(scope="module")
def clobber_start():
    return load_beliefs("clobber.beliefs")


# --- operators ---


def test_operators_from_rover_summaries(mars, mars_table):
    plans, actions = mars
    operators = build_operators(mars_table, actions, plans)
    assert len(operators) == 16
    assert [op.name for op in operators[:3]] == ["breakCon", "calib", "dropSoil"]
    by_name = {op.name: op for op in operators}
    transmit = by_name["transmitRes_1"]
    assert transmit.is_abstract
    assert transmit.params == (Variable("y"), Variable("l"))
    assert transmit.post == {pos("rT", "?y")}
    assert transmit.rank == 1
    explore = by_name["explore_2"]
    assert explore.pre == TRUE
    assert explore.rank == 3
    assert explore.step(Substitution({"x": Constant("lander"), "y": Constant("s1")})) == Event(
        Atom.of("explore", "lander", "s1")
    )
    move = by_name["move"]
    assert not move.is_abstract
    assert move.post == {pos("at", "?y"), neg("at", "?x")}


def test_abstract_operators_without_plan_library(mars_table):
    operators = build_abstract_operators(mars_table)
    assert [op.name for op in operators][:2] == ["analyseSoil_1", "doSoilExp_1"]
    assert {op.name for op in operators} >= {"explore_2", "nav_2", "transmitRes_1"}


def test_operator_effects_stay_within_parameters():
    with pytest.raises(ValueError):
        AbstractOperator("bad", Atom.of("bad", "?x"), (Variable("x"),), TRUE, {pos("p", "?z")})


def test_primitive_operators_follow_action_rules():
    _, actions = load_domain("move_event.plib", "move_action.alib")
    (move,) = build_primitive_operators(actions)
    assert move.name == "move"
    assert render(move.pre) == "(and (at ?x) (not (at ?y)))"


def test_ground_operators_skip_false_preconditions():
    plans = parse_plan_library("(declare-event ghost 0)\n(plan-rule (event haunt) (context true) (body (!ghost)))")
    table = summ(plans, ActionLibrary())
    ground = ground_operators(build_operators(table, ActionLibrary(), plans), (A,))
    assert [g.operator.name for g in ground] == ["haunt_0"]


# --- export ---


def test_export_with_context_variables():
    plans, actions, table = _domain("mov.plib", "mov.alib")
    text = export_pddl_like(build_operators(table, actions, plans), "trucks")
    assert text.startswith("(define (domain trucks)\n")
    assert "  (:predicates (in ?a1 ?a2) (truckAt ?a1 ?a2))" in text
    assert "  ;; abstract\n  (:action mov_3\n    :parameters (?p ?t ?l)\n" in text
    assert "    :precondition (in ?p ?t)\n    :effect (and (truckAt ?t ?l)))" in text
    assert text.index("(:action drive") < text.index("(:action mov_3")
    assert "    :precondition (and)\n" in text
    assert text.endswith(")\n")


def test_export_equality_and_false():
    plans, actions, table = _domain("sendmail.plib")
    text = export_pddl_like(build_operators(table, actions, plans))
    assert ":precondition (or (not (= ?f ?t)) (= ?f ?t))" in text
    assert ":effect (and)" in text

    plans = parse_plan_library("(declare-event ghost 1)")
    text = export_pddl_like(build_operators(summ(plans, ActionLibrary()), ActionLibrary(), plans))
    assert ":precondition (or)" in text


def test_export_is_deterministic(mars, mars_table):
    plans, actions = mars
    operators = build_operators(mars_table, actions, plans)
    assert export_pddl_like(operators) == export_pddl_like(tuple(reversed(operators)))


# --- planner ---


def test_planner_prefers_abstract_operators(mars, mars_table, mars_beliefs):
    plans, actions = mars
    beliefs, universe = mars_beliefs
    operators = build_operators(mars_table, actions, plans)
    plan = plan_classical(beliefs, Lit(pos("rT", "s1")), operators, universe)
    (step,) = plan.steps
    assert step.operator == "explore_2"
    assert step.step == Event(Atom.of("explore", "lander", "s1"))
    assert step.abstract
    assert plan.initial_state == beliefs


def test_planner_finds_two_step_plan(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = plan_classical(beliefs, GOAL_R, build_operators(table, actions, plans), universe)
    assert plan.program == (Event(Atom.of("e1")), Event(Atom.of("e2")))
    states = simulate(plan, build_operators(table, actions, plans))
    assert [sorted(a.predicate for a in s) for s in states] == [["p"], ["p", "q"], ["p", "q", "r"]]


def test_planner_goal_already_holds(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = plan_classical(beliefs, Lit(pos("p")), build_operators(table, actions, plans), universe)
    assert plan.steps == ()


def test_planner_reports_unreachable_goals(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    operators = build_operators(table, actions, plans)
    with pytest.raises(NoPlanError):
        plan_classical(beliefs, Lit(pos("s")), operators, universe)
    with pytest.raises(NoPlanError):
        plan_classical(beliefs, GOAL_R, operators, universe, PlanningBounds(max_plan_length=1))
    with pytest.raises(BoundsExceededError):
        plan_classical(beliefs, GOAL_R, operators, universe, PlanningBounds(max_expanded_states=1))


def test_planner_honours_exclusions(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    operators = build_operators(table, actions, plans)
    first = plan_classical(beliefs, GOAL_R, operators, universe)
    second = plan_classical(beliefs, GOAL_R, operators, universe, exclude={first.key})
    assert second.key != first.key
    assert second.program == (Event(Atom.of("e1")), Event(Atom.of("e1")), Event(Atom.of("e2")))


def _switch(name, pre, *post):
    return AbstractOperator(name, Atom.of(name), (), parse_formula(pre), set(post))


def test_planner_revisits_states_of_excluded_plans():
    operators = [
        _switch("o1", "(and (not (s)) (not (t)))", pos("s")),
        _switch("o2", "(and (s) (not (g)))", pos("g")),
        _switch("o3", "(and (not (s)) (not (t)))", pos("t")),
        _switch("o4", "(t)", pos("s"), neg("t")),
    ]
    start = BeliefBase()
    first = plan_classical(start, Lit(pos("g")), operators, (A,))
    assert [s.operator for s in first.steps] == ["o1", "o2"]
    second = plan_classical(start, Lit(pos("g")), operators, (A,), exclude={first.key})
    assert [s.operator for s in second.steps] == ["o3", "o4", "o2"]
    with pytest.raises(NoPlanError):
        plan_classical(start, Lit(pos("g")), operators, (A,), exclude={first.key, second.key})


def test_planning_bounds_validate():
    with pytest.raises(ValueError):
        PlanningBounds(max_attempts=0)
    assert PlanningBounds.from_config({"max_plan_length": 3}).max_plan_length == 3


# --- classification ---


def test_ground_plan_binds_extra_precondition_variables(mars, mars_table, mars_beliefs):
    plans, actions = mars
    beliefs, universe = mars_beliefs
    operators = build_operators(mars_table, actions, plans)
    plan = ground_plan_from_steps([Event(Atom.of("transmitRes", "s1"))], operators, beliefs, universe)
    assert plan.steps[0].binding == Substitution({"y": Constant("s1"), "l": Constant("lander")})
    bare = ground_plan_from_steps([Event(Atom.of("transmitRes", "s1"))], operators)
    assert bare.steps[0].binding == Substitution({"y": Constant("s1")})
    assert bare.initial_state is None


def test_ground_plan_rejects_unknown_steps(mars, mars_table):
    plans, actions = mars
    operators = build_operators(mars_table, actions, plans)
    with pytest.raises(UnknownActionError):
        ground_plan_from_steps([Act(Atom.of("zap"))], operators)
    with pytest.raises(MissingSummaryError):
        ground_plan_from_steps([Event(Atom.of("dance"))], operators)


def test_plan_with_possible_clobbering(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = _plan_from("clobber.plan", plans, actions, table, beliefs, universe)
    verdict = classify_plan(plan, table, actions, plans)
    assert isinstance(verdict, PotentiallyIncorrect)
    assert verdict.witnesses == (Witness(pos("p"), 2, 1, neg("p"), EMPTY),)
    assert verdict.to_json()["witnesses"][0] == {
        "literal": "(p)", "step": 2, "undoing_step": 1, "undoing_literal": "(not (p))", "theta": "{}",
        "disjunctive": False,
    }


def test_restored_literal_is_correct():
    plans, actions, table = _domain("three_step.plib", "three_step.alib")
    plan = _plan_from("three_step.plan", plans, actions, table)
    assert classify_plan(plan, table, actions, plans) == Correct()
    plan = _plan_from("independent.plan", plans, actions, table)
    assert classify_plan(plan, table, actions, plans) == Correct()


def test_unrestored_literal_is_flagged():
    plans, actions, table = _domain("three_step.plib", "three_step.alib")
    plan = _plan_from("three_step_unrestored.plan", plans, actions, table)
    verdict = classify_plan(plan, table, actions, plans)
    assert verdict.witnesses == (Witness(pos("p"), 3, 2, neg("p"), EMPTY),)


def test_later_undo_after_restoration_is_flagged():
    plans, actions, table = _domain("three_step.plib", "three_step.alib")
    steps = parse_plan("(act setP) (!flip) (act restoreP) (!flip) (act needP)", plans, actions)
    plan = ground_plan_from_steps(steps, build_operators(table, actions, plans))
    (witness,) = classify_plan(plan, table, actions, plans).witnesses
    assert (witness.step, witness.undoing_step) == (5, 4)


def test_certainly_undone_literal_is_flagged():
    plans, actions = load_domain("three_step.plib", "three_step.alib")
    actions = ActionLibrary(actions.rules + parse_action_library("(action (clearP) (pre true) (add) (del (p)))").rules)
    table = summ(plans, actions)
    steps = parse_plan("(act clearP) (act needP)", plans, actions)
    plan = ground_plan_from_steps(steps, build_operators(table, actions, plans))
    verdict = classify_plan(plan, table, actions, plans)
    assert verdict.witnesses == (Witness(pos("p"), 2, 1, neg("p"), EMPTY),)


# --- resolution ---


def test_resolve_finds_a_decomposition(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = _plan_from("clobber.plan", plans, actions, table, beliefs, universe)
    verdict = classify_plan(plan, table, actions, plans)
    resolved = resolve(plan, beliefs, GOAL_R, plans, actions, universe, verdict=verdict)
    assert isinstance(resolved, Correct)
    assert [c.rule_id for c in resolved.outcome.tree] == ["R0", "R2"]
    assert Atom.of("r") in resolved.outcome.beliefs


def test_resolve_rejects_plans_without_decomposition(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = _plan_from("clobber.plan", plans, actions, table, beliefs, universe)
    verdict = classify_plan(plan, table, actions, plans)
    only_clearing, _ = load_domain("clobber_no_first.plib")
    resolved = resolve(plan, beliefs, GOAL_R, only_clearing, actions, universe, verdict=verdict)
    assert isinstance(resolved, DefinitelyIncorrect)
    assert resolved.witnesses == verdict.witnesses
    assert resolved.to_json()["verdict"] == "definitely_incorrect"


def test_resolve_needs_a_flagged_plan(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = _plan_from("clobber.plan", plans, actions, table, beliefs, universe)
    with pytest.raises(PreconditionViolationError):
        resolve(plan, beliefs, GOAL_R, plans, actions, universe, verdict=Correct())


def test_execute_plan_checks_the_goal(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, universe = clobber_start
    plan = _plan_from("clobber.plan", plans, actions, table, beliefs, universe)
    assert execute_plan(plan, beliefs, GOAL_R, plans, actions, universe) is not None
    assert execute_plan(plan, beliefs, Lit(neg("q")), plans, actions, universe) is None


# --- plan, check, resolve ---


def test_verified_rover_plan(mars, mars_table, mars_beliefs):
    plans, actions = mars
    beliefs, universe = mars_beliefs
    accepted = plan_abstract_verified(beliefs, Lit(pos("rT", "s1")), plans, actions, universe, table=mars_table)
    assert accepted.plan.program == (Event(Atom.of("explore", "lander", "s1")),)
    assert isinstance(accepted.verdict, Correct)
    assert accepted.witness is not None
    assert Atom.of("rT", "s1") in accepted.witness.beliefs
    assert accepted.attempts == 1
    report = accepted.to_json()
    assert report["verdict"] == "correct"
    assert report["plan"][0]["operator"] == "explore_2"
    assert report["excluded"] == []


def test_verified_plan_after_resolution(clobber_domain, clobber_start):
    plans, actions, _ = clobber_domain
    beliefs, universe = clobber_start
    accepted = plan_abstract_verified(beliefs, GOAL_R, plans, actions, universe)
    assert accepted.plan.program == (Event(Atom.of("e1")), Event(Atom.of("e2")))
    assert isinstance(accepted.verdict, Correct)
    assert accepted.verdict.outcome == accepted.witness


def test_correct_plan_without_execution_is_an_error(clobber_start):
    need = "(plan-rule (event e2) (context (and (p) (q))) (body (add r)))\n"
    plans = parse_plan_library("(plan-rule (event e1) (context true) (body (del p) (add q)))\n" + need)
    stale = summ(parse_plan_library("(plan-rule (event e1) (context true) (body (add q)))\n" + need), ActionLibrary())
    beliefs, universe = clobber_start
    with pytest.raises(UnsoundVerdictError) as raised:
        plan_abstract_verified(beliefs, GOAL_R, plans, ActionLibrary(), universe, table=stale)
    assert raised.value.plan.program == (Event(Atom.of("e1")), Event(Atom.of("e2")))
    assert "(event e1) (event e2)" in str(raised.value)


def test_every_candidate_rejected():
    plans, actions, table = _domain("clobber_clears_p.plib")
    beliefs, universe = load_beliefs("clobber.beliefs")
    with pytest.raises(NoPlanError):
        plan_abstract_verified(beliefs, GOAL_R, plans, actions, universe, PlanningBounds(max_plan_length=3), table=table)
    with pytest.raises(BoundsExceededError):
        plan_abstract_verified(
            beliefs, GOAL_R, plans, actions, universe, PlanningBounds(max_plan_length=3, max_attempts=2), table=table
        )


def test_goal_formulas_from_text(clobber_domain, clobber_start):
    plans, actions, _ = clobber_domain
    beliefs, universe = clobber_start
    accepted = plan_abstract_verified(beliefs, parse_formula("(and (q) (not (r)))"), plans, actions, universe)
    assert accepted.plan.program == (Event(Atom.of("e1")),)


def test_empty_plan_is_correct(clobber_domain, clobber_start):
    plans, actions, table = clobber_domain
    beliefs, _ = clobber_start
    assert classify_plan(GroundPlan((), beliefs), table, actions, plans) == Correct()
