# plansumm/core/config.py

# Global settings shared by every tool.
SEED_ENV_VAR = "PLANSUMM_SEED"
CONFIG_DIR_ENV_VAR = "PLANSUMM_CONFIG_DIR"
DEFAULT_LOG_LEVEL = "warning"
REPORT_INDENT = 2
