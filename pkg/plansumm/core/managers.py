# plansumm/core/managers.py

from __future__ import annotations

import json
import os
from typing import Any, Dict, Optional

import structlog

from .config import CONFIG_DIR_ENV_VAR

logger = structlog.get_logger(__name__)


class AppManager:
    """Resolves the config directory and loads per-tool settings."""

    def __init__(self, config_dir: Optional[str] = None, base_dir: Optional[str] = None):
        if base_dir:
            self.project_root = base_dir
        else:
            # core -> plansumm -> project root
            self.project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
        self.config_dir = (
            config_dir
            or os.environ.get(CONFIG_DIR_ENV_VAR)
            or os.path.join(self.project_root, "config")
        )

    def config_path(self, tool_name: str) -> str:
        return os.path.join(self.config_dir, f"{tool_name}.json")

    def load_config(self, tool_name: str, defaults: Dict[str, Any]) -> Dict[str, Any]:
        """Tool defaults overlaid with `<tool>.json` when one exists."""
        path = self.config_path(tool_name)
        if not os.path.exists(path):
            return dict(defaults)
        try:
            with open(path, "r", encoding="utf-8") as f:
                settings = json.load(f)
        except (json.JSONDecodeError, OSError) as e:
            logger.warning("config_unreadable", tool=tool_name, path=path, error=str(e))
            return dict(defaults)
        if not isinstance(settings, dict):
            logger.warning("config_not_an_object", tool=tool_name, path=path)
            return dict(defaults)
        unknown = sorted(set(settings) - set(defaults))
        if unknown:
            logger.warning("config_unknown_keys", tool=tool_name, keys=unknown)
        return {**defaults, **{k: v for k, v in settings.items() if k in defaults}}

    def save_config(self, tool_name: str, settings_data: Dict[str, Any]) -> None:
        """Writes a tool's settings to its JSON file, creating the directory."""
        os.makedirs(self.config_dir, exist_ok=True)
        with open(self.config_path(tool_name), "w", encoding="utf-8") as f:
            json.dump(settings_data, f, indent=4, sort_keys=True)
            f.write("\n")
