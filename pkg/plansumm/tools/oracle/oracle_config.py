# plansumm/tools/oracle/oracle_config.py

DEFAULTS = {
    "max_depth": 32,
    "max_outcomes": 1_000_000,
    "max_belief_bases": 4096,
}
