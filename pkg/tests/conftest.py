import json
import os
from pathlib import Path

import numpy as np
import pytest
import structlog

from plansumm.core.config import SEED_ENV_VAR
from plansumm.tools.plandsl import ActionLibrary, link_libraries, parse_action_library, parse_belief_base, parse_domain
from plansumm.tools.summarize import summ

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def _reset_structlog():
    """CLI runs bind structlog to the per-test captured stderr; undo that afterwards."""
    yield
    structlog.reset_defaults()


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def read_fixture(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def load_domain(plib: str, alib: str = "empty.alib"):
    actions = parse_action_library(read_fixture(alib))
    plans, inline = parse_domain(read_fixture(plib))
    actions = ActionLibrary(actions.rules + inline.rules)
    link_libraries(plans, actions)
    return plans, actions


def load_beliefs(name: str):
    return parse_belief_base(read_fixture(name))


@pytest.fixture
def seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


@pytest.fixture
def rng(seed):
    return np.random.default_rng(seed)


@pytest.fixture(scope="session")
def mars():
    return load_domain("mars.plib", "mars.alib")


@pytest.fixture(scope="session")
def mars_table(mars):
    plans, actions = mars
    return summ(plans, actions)


@pytest.fixture(scope="session")
def mars_beliefs():
    return load_beliefs("mars.beliefs")


@pytest.fixture(scope="session")
def clobber():
    return load_domain("clobber.plib")


@pytest.fixture
def config_dir(tmp_path):
    """Empty settings directory so a developer's config never leaks into tests."""
    path = tmp_path / "config"
    path.mkdir()
    return str(path)


@pytest.fixture(scope="session")
def mars_reference():
    """Expected must and mentioned literals of every rover table row, rendered."""
    return json.loads(read_fixture("mars_table.json"))
