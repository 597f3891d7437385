"""Shared fixtures: the toy and A8 runs are computed once per session."""
from pathlib import Path

import pytest

from flatdeform.core.report import DeformationRun
from flatdeform.utils.problem import build_a8, build_m2_toy

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def toy_run() -> DeformationRun:
    run = DeformationRun(build_m2_toy())
    run.analyze()
    return run


@pytest.fixture(scope="session")
def a8_run() -> DeformationRun:
    run = DeformationRun(build_a8())
    run.analyze()
    return run
