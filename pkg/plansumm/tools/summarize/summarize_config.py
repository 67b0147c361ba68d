# plansumm/tools/summarize/summarize_config.py

DEFAULTS = {
    "workers": 1,
}
