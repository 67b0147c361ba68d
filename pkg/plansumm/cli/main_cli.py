# plansumm/cli/main_cli.py

from __future__ import annotations

import argparse
import itertools
import json
import sys
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import structlog

from plansumm.core.config import DEFAULT_LOG_LEVEL, REPORT_INDENT
from plansumm.core.errors import (
    BoundsExceededError, DslSyntaxError, MissingSummaryError, NoExecutionFoundError, NonGroundFormulaError,
    NoPlanError, PlanSummError, PreconditionViolationError, RecursiveLibraryError, UnknownActionError,
    UnsoundVerdictError, ValidationError,
)
from plansumm.core.log import configure_logging
from plansumm.core.logic import TRUE, BeliefBase, Constant, Substitution, render, sorted_literals
from plansumm.core.managers import AppManager
from plansumm.core.unify import apply, match, variables_of
from plansumm.tools.abstraction import (
    DefinitelyIncorrect, PlanningBounds, PotentiallyIncorrect, build_operators, classify_plan,
    export_pddl_like, ground_plan_from_steps, plan_abstract_verified, resolve,
)
from plansumm.tools.abstraction.abstraction_config import DEFAULTS as ABSTRACTION_DEFAULTS
from plansumm.tools.oracle import (
    ExecutionBounds, ExecutionOutcome, capture_failures, iter_executions, oracle_must_literals,
    oracle_precondition_check, validate_coherence,
)
from plansumm.tools.oracle.oracle_config import DEFAULTS as ORACLE_DEFAULTS
from plansumm.tools.plandsl import (
    ActionLibrary, Event, PlanLibrary, check_library_coherence, link_libraries, parse_action_library,
    parse_belief_base, parse_domain, parse_formula, parse_plan, parse_steps,
)
from plansumm.tools.plandsl.plandsl_config import DEFAULTS as PLANDSL_DEFAULTS
from plansumm.tools.plandsl.plandsl_report import emit_report
from plansumm.tools.summarize import SummaryTable, canonical_head, summ, summ_plan
from plansumm.tools.summarize.summarize_config import DEFAULTS as SUMMARIZE_DEFAULTS

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_RECURSIVE = 2
EXIT_DEFINITELY_INCORRECT = 3
EXIT_NO_PLAN = 4
EXIT_BOUNDS = 5
EXIT_COUNTEREXAMPLE = 6

_EXIT_CODES: Tuple[Tuple[type, int], ...] = (
    (RecursiveLibraryError, EXIT_RECURSIVE),
    (NoPlanError, EXIT_NO_PLAN),
    (BoundsExceededError, EXIT_BOUNDS),
    (UnsoundVerdictError, EXIT_COUNTEREXAMPLE),
    (DslSyntaxError, EXIT_INPUT),
    (ValidationError, EXIT_INPUT),
    (NonGroundFormulaError, EXIT_INPUT),
    (UnknownActionError, EXIT_INPUT),
    (MissingSummaryError, EXIT_INPUT),
    (NoExecutionFoundError, EXIT_INPUT),
    (PreconditionViolationError, EXIT_INPUT),
)


# --- Helpers ---


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _dump(data: Any) -> str:
    return json.dumps(data, indent=REPORT_INDENT, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _settings(args: argparse.Namespace, tool: str, defaults: Dict[str, Any]) -> Dict[str, Any]:
    """DEFAULTS < <tool>.json < command-line flags."""
    settings = AppManager(config_dir=args.config_dir).load_config(tool, defaults)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _execution_bounds(args: argparse.Namespace) -> ExecutionBounds:
    return ExecutionBounds.from_config(_settings(args, "oracle", ORACLE_DEFAULTS))


def _planning_bounds(args: argparse.Namespace) -> PlanningBounds:
    return PlanningBounds.from_config(_settings(args, "abstraction", ABSTRACTION_DEFAULTS))


def _libraries(args: argparse.Namespace) -> Tuple[PlanLibrary, ActionLibrary]:
    actions = parse_action_library(_read(args.alib))
    plans, inline = parse_domain(_read(args.plib))
    actions = ActionLibrary(actions.rules + inline.rules)
    link_libraries(plans, actions)
    return plans, actions


def _summaries(args: argparse.Namespace, plans: PlanLibrary, actions: ActionLibrary) -> SummaryTable:
    workers = int(_settings(args, "summarize", SUMMARIZE_DEFAULTS)["workers"])
    return summ(plans, actions, workers=workers)


def _beliefs(args: argparse.Namespace) -> Tuple[BeliefBase, Tuple[Constant, ...]]:
    return parse_belief_base(_read(args.beliefs))


def _traced_executions(beliefs, program, plans, actions, universe, bounds) -> Iterator[ExecutionOutcome]:
    """Executions of every ground instance of `program` from `beliefs`,
    groundings in lexicographic order."""
    universe = tuple(sorted(set(universe)))
    names = [v.name for v in variables_of(program)]
    for values in itertools.product(universe, repeat=len(names)):
        ground = apply(Substitution(zip(names, values)), program)
        yield from iter_executions(beliefs, ground, plans, actions, universe, bounds)


def _write_trace(path: str, outcomes: Iterable) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for outcome in outcomes:
            f.write(json.dumps(outcome.to_json(), sort_keys=True, ensure_ascii=False) + "\n")
            count += 1
    return count


# --- Commands ---


def cmd_summarize(args: argparse.Namespace) -> int:
    plans, actions = _libraries(args)
    table = _summaries(args, plans, actions)
    report = _settings(args, "plandsl", PLANDSL_DEFAULTS)
    include_all = args.all or bool(report["include_all"])
    _emit(emit_report(table, include_all=include_all, indent=int(report["report_indent"])), args.output)
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    plans, actions = _libraries(args)
    table = _summaries(args, plans, actions)
    _emit(export_pddl_like(build_operators(table, actions, plans), args.domain_name), args.output)
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    plans, actions = _libraries(args)
    beliefs, universe = _beliefs(args)
    steps = parse_plan(_read(args.plan), plans, actions)
    table = _summaries(args, plans, actions)
    plan = ground_plan_from_steps(steps, build_operators(table, actions, plans), beliefs, universe)
    verdict = classify_plan(plan, table, actions, plans)
    if isinstance(verdict, PotentiallyIncorrect) and args.resolve:
        goal = parse_formula(args.goal) if args.goal else TRUE
        verdict = resolve(plan, beliefs, goal, plans, actions, universe, _execution_bounds(args), verdict)
    report = verdict.to_json()
    report["plan"] = [s.to_json() for s in plan.steps]
    _emit(_dump(report), args.output)
    return EXIT_DEFINITELY_INCORRECT if isinstance(verdict, DefinitelyIncorrect) else EXIT_OK


def cmd_plan(args: argparse.Namespace) -> int:
    plans, actions = _libraries(args)
    beliefs, universe = _beliefs(args)
    goal = parse_formula(args.goal)
    table = _summaries(args, plans, actions)
    accepted = plan_abstract_verified(
        beliefs, goal, plans, actions, universe, _planning_bounds(args), _execution_bounds(args), table
    )
    _emit(_dump(accepted.to_json()), args.output)
    return EXIT_OK


def _target_event(args: argparse.Namespace, plans: PlanLibrary):
    if not args.target:
        raise ValidationError("verify", f"mode {args.mode} needs a ground event TARGET")
    steps = parse_plan(args.target, plans)
    if len(steps) != 1 or not isinstance(steps[0], Event):
        raise ValidationError("verify", f"TARGET must be a single ground event, got {args.target!r}")
    return steps[0]


def _verify_must(args, plans, actions, beliefs, universe, bounds) -> Tuple[Dict[str, Any], bool, Sequence]:
    step = _target_event(args, plans)
    table = _summaries(args, plans, actions)
    event = step.event_type
    theta = match(canonical_head(event, plans), step.atom)
    computed = frozenset(apply(theta, l) for l in table[event].must)
    bases = None if args.sweep else [beliefs]
    oracle = oracle_must_literals(step.atom, plans, actions, universe, bounds, start_bases=bases)
    missing = computed - oracle
    report = {
        "computed": [render(l) for l in sorted_literals(computed)],
        "oracle": [render(l) for l in sorted_literals(oracle)],
        "missing": [render(l) for l in sorted_literals(missing)],
        "sound": not missing,
    }
    return report, not missing, (step,)


def _verify_precondition(args, plans, actions, beliefs, universe, bounds):
    step = _target_event(args, plans)
    table = _summaries(args, plans, actions)
    report = oracle_precondition_check(step.atom, beliefs, plans, actions, universe, bounds, table)
    return dict(report), report["sound"], (step,)


def _verify_capture(args, plans, actions, beliefs, universe, bounds):
    if not args.target:
        raise ValidationError("verify", "mode capture needs a rule label or a program as TARGET")
    table = _summaries(args, plans, actions)
    rule = plans.rule(args.target)
    if rule is not None:
        program = rule.body
        literals = table.body(rule.rule_id).mentioned
    else:
        program = parse_steps(args.target)
        literals = summ_plan(program, plans, actions, table).mentioned
    bases = None if args.sweep else [beliefs]
    missed = capture_failures(literals, program, plans, actions, universe, bounds, start_bases=bases)
    report = {
        "mentioned": [render(l) for l in sorted_literals(literals)],
        "uncaptured": [render(l) for l in missed],
        "captures": not missed,
    }
    return report, not missed, program


def _verify_coherence(args, plans, actions, beliefs, universe, bounds):
    flagged = check_library_coherence(actions)
    violations = validate_coherence(plans, actions, universe, bounds)
    ok = not violations and not flagged
    report = {
        "violations": [v.to_json() for v in violations],
        "action_violations": [v.to_json() for v in flagged],
        "coherent": ok,
    }
    return report, ok, ()


_VERIFY_MODES: Dict[str, Callable] = {
    "must": _verify_must,
    "precondition": _verify_precondition,
    "capture": _verify_capture,
    "coherence": _verify_coherence,
}


def cmd_verify(args: argparse.Namespace) -> int:
    plans, actions = _libraries(args)
    beliefs, universe = _beliefs(args)
    bounds = _execution_bounds(args)
    report, ok, program = _VERIFY_MODES[args.mode](args, plans, actions, beliefs, universe, bounds)
    report["mode"] = args.mode
    if args.target:
        report["target"] = args.target
    if args.trace and program:
        written = _write_trace(args.trace, _traced_executions(beliefs, program, plans, actions, universe, bounds))
        logger.info("trace_written", path=args.trace, executions=written)
    _emit(_dump(report), args.output)
    return EXIT_OK if ok else EXIT_COUNTEREXAMPLE


# --- Parser ---


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=DEFAULT_LOG_LEVEL, help="debug, info, warning or error")
    common.add_argument("--config-dir", default=None, help="directory holding <tool>.json settings")
    common.add_argument("--max-depth", type=int, default=None, help="decomposition depth bound")
    common.add_argument("--max-outcomes", type=int, default=None, help="successful executions bound")
    common.add_argument("--max-belief-bases", type=int, default=None, help="start belief bases bound")
    common.add_argument("--max-plan-length", type=int, default=None, help="planner plan length bound")
    common.add_argument("--workers", type=int, default=None, help="threads per rank while summarising")
    common.add_argument("--output", default=None, help="write the result here instead of stdout")
    return common


def _libraries_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("plib", help="plan library file")
    p.add_argument("alib", help="action library file")


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="plansumm", description="Summary information for BDI/HTN plan libraries")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("summarize", parents=[common], help="summaries of every event type as JSON")
    _libraries_arguments(p)
    p.add_argument("--all", action="store_true", help="include plan-body and primitive rows")
    p.set_defaults(func=cmd_summarize)

    p = subparsers.add_parser("export", parents=[common], help="planning operators as a PDDL-like domain")
    _libraries_arguments(p)
    p.add_argument("--domain-name", default="plansumm")
    p.set_defaults(func=cmd_export)

    p = subparsers.add_parser("check", parents=[common], help="classify a plan that uses abstract steps")
    _libraries_arguments(p)
    p.add_argument("beliefs", help="belief base file")
    p.add_argument("plan", help="plan file of ground act/event steps")
    p.add_argument("--goal", default=None, help="goal formula used by --resolve")
    p.add_argument("--resolve", action="store_true", help="search decompositions of a flagged plan")
    p.set_defaults(func=cmd_check)

    p = subparsers.add_parser("plan", parents=[common], help="plan with abstract operators and verify the result")
    _libraries_arguments(p)
    p.add_argument("beliefs", help="belief base file")
    p.add_argument("--goal", required=True, help="goal formula")
    p.set_defaults(func=cmd_plan)

    p = subparsers.add_parser("verify", parents=[common], help="check computed summaries against the oracle")
    _libraries_arguments(p)
    p.add_argument("beliefs", help="belief base file")
    p.add_argument("target", nargs="?", default=None, help="ground event, rule label or program")
    p.add_argument("--mode", choices=sorted(_VERIFY_MODES), required=True)
    p.add_argument("--sweep", action="store_true", help="use every candidate start belief base")
    p.add_argument("--trace", default=None, help="write the target's executions as JSON lines")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.log_level)
    except ValueError as e:
        parser.error(str(e))
    try:
        return args.func(args)
    except PlanSummError as e:
        for kind, code in _EXIT_CODES:
            if isinstance(e, kind):
                break
        else:
            code = EXIT_INPUT
        sys.stderr.write(f"plansumm: error: {e}\n")
        return code
    except OSError as e:
        sys.stderr.write(f"plansumm: error: {e}\n")
        return EXIT_INPUT
