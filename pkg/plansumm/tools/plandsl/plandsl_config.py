# plansumm/tools/plandsl/plandsl_config.py

DEFAULTS = {
    "report_indent": 2,
    "include_all": False,
}
