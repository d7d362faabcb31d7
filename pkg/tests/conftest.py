"""Shared pytest setup: repository root on sys.path, the ``slow`` marker and small fixtures."""
import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

EXPERIMENTS_DIR = project_root / "experiments"


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: Monte-Carlo acceptance runs (deselect with -m \"not slow\")"
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def experiments_dir():
    return EXPERIMENTS_DIR
