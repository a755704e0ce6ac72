from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from equivobs.sim import ScenarioConfig, run_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def hovercraft_cfg() -> ScenarioConfig:
    return ScenarioConfig.load(CONFIGS / "hovercraft.json")


@pytest.fixture(scope="session")
def hovercraft_records(hovercraft_cfg):
    return run_scenario(hovercraft_cfg)
