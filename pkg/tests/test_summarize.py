import pytest

from plansumm.core import (
    FALSE, TRUE, And, Atom, Eq, Lit, MissingSummaryError, Neq, Or, RecursiveLibraryError, Substitution,
    UnknownActionError, Variable, neg, pos, render,
)
from plansumm.core.unify import contains_variant
from plansumm.tools.plandsl import (
    Act, AddBelief, DelBelief, Event, EventType, Test, parse_plan_library,
)
from plansumm.tools.plandsl.models import ActionLibrary
from plansumm.tools.summarize import (
    EPSILON, SummaryInfo, UndoWitness, children, compute_mnt, compute_ranking, instantiate_summary, may_undone,
    may_undone_witness, must_undone, post, summ, summ_plan,
)

from conftest import load_domain

EXPLORE, NAV = EventType("explore", 2), EventType("nav", 2)
DO_SOIL, GET_SOIL = EventType("doSoilExp", 1), EventType("getSoilRes", 1)
ANALYSE, TRANSMIT = EventType("analyseSoil", 1), EventType("transmitRes", 1)

SOIL_RESULTS = {pos("rT", "?y"), pos("hMC", "?y"), pos("hPS", "?y"), neg("hSS", "?y")}


def _summary(step, must, mentioned=None):
    must = frozenset(must)
    return SummaryInfo(step, (), EPSILON, must, must | frozenset(mentioned or ()))


# --- ranking ---


def test_children(mars):
    plans, _ = mars
    assert children(EXPLORE, plans) == {NAV, DO_SOIL}
    assert children(TRANSMIT, plans) == {NAV}
    assert children(ANALYSE, plans) == frozenset()


def test_mars_ranking(mars):
    plans, _ = mars
    ranking = compute_ranking(plans)
    assert dict(ranking.ranks) == {NAV: 0, ANALYSE: 0, GET_SOIL: 1, TRANSMIT: 1, DO_SOIL: 2, EXPLORE: 3}
    assert ranking.levels() == (0, 1, 2, 3)
    assert ranking.events_at(1) == (GET_SOIL, TRANSMIT)


def test_self_recursion_is_rejected():
    plans, actions = load_domain("recursive_self.plib")
    with pytest.raises(RecursiveLibraryError) as excinfo:
        compute_ranking(plans)
    assert excinfo.value.cycle == [EventType("e", 0), EventType("e", 0)]
    with pytest.raises(RecursiveLibraryError):
        summ(plans, actions)


def test_cycle_is_reported():
    plans, _ = load_domain("recursive_cycle.plib")
    with pytest.raises(RecursiveLibraryError) as excinfo:
        compute_ranking(plans)
    a, b, c = (EventType(n, 0) for n in "abc")
    assert excinfo.value.cycle == [a, b, c, a]
    assert "a/0 -> b/0 -> c/0 -> a/0" in str(excinfo.value)


# --- postconditions ---


def test_post_of_primitive_steps(mars):
    _, actions = mars
    assert post(Act(Atom.of("move", "lander", "s1")), actions) == {pos("at", "s1"), neg("at", "lander")}
    assert post(AddBelief(Atom.of("p", "?x")), actions) == {pos("p", "?x")}
    assert post(DelBelief(Atom.of("p")), actions) == {neg("p")}
    assert post(Test(TRUE), actions) == frozenset()
    with pytest.raises(TypeError):
        post(Event(Atom.of("nav", "?x", "?y")), actions)


def test_post_unknown_action():
    with pytest.raises(UnknownActionError):
        post(Act(Atom.of("zap")), ActionLibrary())


# --- must / may undoing ---


def test_undoing_examples():
    delete_y = DelBelief(Atom.of("at", "?y"))
    delete_x = DelBelief(Atom.of("at", "?x"))
    delta = {delete_y: _summary(delete_y, [neg("at", "?y")]), delete_x: _summary(delete_x, [neg("at", "?x")])}
    lit = pos("at", "?x")
    assert may_undone(lit, [delete_y], delta)
    assert not must_undone(lit, [delete_y], delta)
    assert may_undone(lit, [delete_x], delta)
    assert must_undone(lit, [delete_x], delta)
    assert not may_undone(lit, [], delta)
    assert not may_undone(pos("in", "?x"), [delete_y, delete_x], delta)


def test_may_undone_witness_reports_earliest_step():
    add_q = AddBelief(Atom.of("q"))
    delete_y = DelBelief(Atom.of("at", "?y"))
    delta = {add_q: _summary(add_q, [pos("q")]), delete_y: _summary(delete_y, [neg("at", "?y")])}
    found = may_undone_witness(pos("at", "?x"), [add_q, delete_y], delta)
    assert found == UndoWitness(1, neg("at", "?y"), Substitution({"x": Variable("y")}))


def test_only_mentioned_literals_may_undo():
    step = Event(Atom.of("e1"))
    delta = {step: _summary(step, [], [neg("p"), pos("q")])}
    assert may_undone(pos("p"), [step], delta)
    assert not must_undone(pos("p"), [step], delta)


def test_undoing_needs_step_summaries():
    with pytest.raises(MissingSummaryError):
        must_undone(pos("p"), [AddBelief(Atom.of("p"))], {})


# --- mentioned literals by expansion ---


def test_compute_mnt_for_transmit(mars):
    plans, actions = mars
    found = compute_mnt(TRANSMIT, plans, actions)
    for lit in [pos("cE"), neg("cE"), pos("rT", "?y"), pos("cal"), neg("at", "?y"), pos("at", "?l")]:
        assert contains_variant(found, lit, {"y"}), render(lit)
    assert len(found) == 6


def test_summary_mentions_are_contained_in_expansion(mars, mars_table):
    plans, actions = mars
    for info in mars_table:
        head = {v.name for v in info.params}
        found = compute_mnt(info.subject, plans, actions)
        for lit in info.mentioned:
            assert contains_variant(found, lit, head), (info.label, render(lit))


def test_compute_mnt_rejects_recursion():
    plans, actions = load_domain("recursive_self.plib")
    with pytest.raises(RecursiveLibraryError):
        compute_mnt(EventType("e", 0), plans, actions)


# --- the rover library ---


def test_mars_body_summaries(mars_table):
    expected = {
        "R1": {pos("cal"), neg("at", "?x"), pos("at", "?y")},
        "R2": {neg("at", "?x"), pos("at", "?y")},
        "R4": {pos("hMC", "?y"), pos("hPS", "?y"), neg("hSS", "?y")},
        "R5": {pos("hMC", "?y"), pos("hPS", "?y")},
        "R6": {pos("rT", "?y"), neg("cE")},
        "R7": {neg("at", "?y"), pos("at", "?l"), pos("rT", "?y")},
        "R0": SOIL_RESULTS,
        "R3": SOIL_RESULTS,
    }
    for rule_id, must in expected.items():
        assert mars_table.body(rule_id).must == must, rule_id
    assert mars_table.body("R7").mentioned == {neg("at", "?y"), pos("at", "?l"), pos("rT", "?y"), pos("cal")}
    # cE is switched off again before the body ends
    assert mars_table.body("R6").mentioned == {pos("rT", "?y"), neg("cE")}
    assert mars_table.body("R4").mentioned == mars_table.body("R4").must


def test_mars_event_summaries(mars_table):
    transmit = mars_table[TRANSMIT]
    assert transmit.params == (Variable("y"),)
    assert transmit.must == {pos("rT", "?y")}
    assert transmit.mentioned == {pos("rT", "?y"), neg("cE"), pos("cal"), neg("at", "?y"), pos("at", "?l")}
    assert render(transmit.precondition) == "(or true (landerAt ?l))"

    assert mars_table[NAV].must == {neg("at", "?x"), pos("at", "?y")}
    assert mars_table[NAV].mentioned == {pos("cal"), neg("at", "?x"), pos("at", "?y")}
    assert mars_table[EXPLORE].must == SOIL_RESULTS
    assert mars_table[EXPLORE].precondition == TRUE
    assert mars_table[DO_SOIL].must == SOIL_RESULTS


def _rendered(literals):
    return sorted(render(l) for l in literals)


def test_mars_table_matches_reference(mars_table, mars_reference):
    rows = {
        "events": {info.label: info for info in mars_table},
        "bodies": dict(mars_table.bodies),
        "primitives": {info.label: info for info in mars_table.primitives.values()},
    }
    for kind, expected in mars_reference.items():
        assert set(rows[kind]) == set(expected), kind
        for subject, row in expected.items():
            info = rows[kind][subject]
            assert _rendered(info.must) == sorted(row["must"]), subject
            assert _rendered(info.mentioned) == sorted(row["mentioned"]), subject


def test_mars_table_shape(mars_table):
    assert len(mars_table) == 6
    assert len(mars_table.bodies) == 8
    assert len(mars_table.primitives) == 10
    assert mars_table.find("transmitRes") is mars_table[TRANSMIT]
    assert mars_table.find("nav/2") is mars_table[NAV]
    assert mars_table.find("nothing") is None
    with pytest.raises(MissingSummaryError):
        mars_table[EventType("nothing", 0)]


def test_parallel_summaries_match(mars, mars_table):
    plans, actions = mars
    assert summ(plans, actions, workers=2) == mars_table


def test_instantiate_summary(mars_table):
    info = instantiate_summary(mars_table[NAV], Atom.of("nav", "lander", "s1"), frozenset())
    assert info.subject == Event(Atom.of("nav", "lander", "s1"))
    assert info.precondition is EPSILON
    assert info.must == {neg("at", "lander"), pos("at", "s1")}
    clashing = instantiate_summary(mars_table[TRANSMIT], Atom.of("transmitRes", "?l"), frozenset())
    assert pos("rT", "?l") in clashing.must
    assert neg("at", "?l") in clashing.mentioned
    assert pos("at", "?l") not in clashing.mentioned


def test_summarise_a_ground_program(mars, mars_table):
    plans, actions = mars
    info = summ_plan([Event(Atom.of("explore", "lander", "s1"))], plans, actions, mars_table)
    assert info.subject == "(event explore lander s1)"
    assert info.must == {pos("rT", "s1"), pos("hMC", "s1"), pos("hPS", "s1"), neg("hSS", "s1")}


# --- smaller libraries ---


def test_hypothetical_must_literal():
    _, table = _summarised("hypothetical.plib", "hypothetical.alib")
    assert pos("p") in table.body("R0").must
    assert neg("p") not in table.body("R1").mentioned
    e1 = table[EventType("e1", 0)]
    assert e1.must == frozenset()
    assert e1.mentioned == {pos("p"), pos("q")}


def test_alternative_routes_home():
    plans, table = _summarised("gotowork.plib", "gotowork.alib")
    home = table[EventType("travelHome", 0)]
    assert home.must == frozenset()
    assert home.mentioned == {pos("fuelUsed"), neg("haveCar")}
    assert home.precondition == Or((
        And((Lit(pos("haveCar")), Lit(neg("intox")))),
        Lit(neg("haveCar")),
        Lit(neg("haveCar")),
    ))
    friday = table[EventType("goToWorkFridays", 0)]
    assert friday.must == {pos("atWork"), pos("worked"), pos("intox")}
    assert friday.mentioned == friday.must | home.mentioned


def test_context_variables_reach_the_precondition():
    _, table = _summarised("mov.plib", "mov.alib")
    info = table[EventType("mov", 3)]
    assert info.must == {pos("truckAt", "?t", "?l")}
    assert info.precondition == Lit(pos("in", "?p", "?t"))


def test_must_literals_follow_head_variables():
    _, table = _summarised("sendmail.plib")
    info = table[EventType("sendMail", 2)]
    assert info.must == frozenset()
    f, t = Variable("f"), Variable("t")
    assert info.precondition == Or((Neq(f, t), Eq(f, t)))
    assert pos("sent", "?t") in info.mentioned

    _, edited = _summarised("sendmail_edited.plib")
    assert edited[EventType("sendMail", 2)].must == {pos("sent", "?t")}


def test_belief_steps_versus_action_steps():
    _, table = _summarised("move_rule.plib")
    move = table[EventType("move", 2)]
    assert move.must == {pos("at", "?y")}
    assert move.mentioned == {pos("at", "?y"), neg("at", "?x")}

    _, table = _summarised("move_event.plib", "move_action.alib")
    assert table[EventType("doMove", 2)].must == {neg("at", "?x"), pos("at", "?y")}


def test_event_without_rules_never_succeeds():
    plans = parse_plan_library(
        "(declare-event ghost 1)\n(plan-rule (event haunt ?x) (context true) (body (!ghost ?x)))"
    )
    table = summ(plans, ActionLibrary())
    ghost = table[EventType("ghost", 1)]
    assert ghost.precondition == FALSE
    assert ghost.params == (Variable("x1"),)
    assert ghost.must == frozenset()
    assert table.ranking[EventType("haunt", 1)] == 1


def test_empty_library():
    table = summ(parse_plan_library(""), ActionLibrary())
    assert len(table) == 0
    assert list(table) == []


def test_summary_info_invariants():
    with pytest.raises(ValueError):
        SummaryInfo(EventType("e", 1), (Variable("x"),), TRUE, {pos("p", "?x")}, frozenset())
    with pytest.raises(ValueError):
        SummaryInfo(EventType("e", 1), (Variable("x"),), TRUE, {pos("p", "?z")}, {pos("p", "?z")})
    with pytest.raises(ValueError):
        SummaryInfo("R0", (), TRUE)
    assert SummaryInfo("R0", (), EPSILON).must == frozenset()


def _summarised(plib, alib="empty.alib"):
    plans, actions = load_domain(plib, alib)
    return plans, summ(plans, actions)
