# plansumm/tools/abstraction/abstraction_config.py

DEFAULTS = {
    "max_plan_length": 8,
    "max_expanded_states": 200_000,
    "max_attempts": 64,
}
