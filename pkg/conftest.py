import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from constructions import build_counterexample  # noqa: E402
from utils.config import default_config  # noqa: E402


@pytest.fixture
def config():
    return default_config(quiet=True)


@pytest.fixture(scope='session')
def construction():
    """The k = 3, n = 1 counterexample: 0 is an isolated eigenvalue."""
    return build_counterexample(3, 1)


@pytest.fixture(scope='session')
def construction_symbol(construction):
    return construction.symbol
