# conftest.py
"""Shared fixtures: registry networks, small grids and a clean ledger per test."""

import numpy as np
import pytest

from rdlab.callbacks import callbacks
from rdlab.grid import Grid
from rdlab.ledger import ledger
from rdlab.networks import get_network


@pytest.fixture(autouse=True)
def clean_ledger():
    ledger.clear_history()
    yield
    ledger.clear_history()
    callbacks.clear()


@pytest.fixture
def four():
    return get_network("four_species")


@pytest.fixture
def grid64():
    return Grid.uniform(1, 1.0, 64)


@pytest.fixture
def grid2d():
    return Grid.uniform(2, 1.0, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

