from .oracle_core import (
    Configuration, EventChoice, ExecutionBounds, ExecutionOutcome, TestChoice, candidate_belief_bases,
    capture_failures, enumerate_executions, has_successful_execution, iter_executions, oracle_captures,
    oracle_must_literals, oracle_precondition_check, read_predicates, replay, validate_coherence,
)
