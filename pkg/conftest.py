#!/usr/bin/env python3
"""
conftest.py

Shared potentials and cached band structures for the hillband test suites.
"""

import numpy as np
import pytest
from loguru import logger

from potential import PeriodicPotential
from quasimomentum import build_map
from spectrum import find_band_edges

SMALL_GRID = 256


def mathieu_potential(grid_size: int = SMALL_GRID) -> PeriodicPotential:
    """p(x) = 2 cos(2 pi x)."""
    return PeriodicPotential(np.array([0.0, 2.0]), np.zeros(0), grid_size)


def sharp_potential(grid_size: int = SMALL_GRID) -> PeriodicPotential:
    """p(x) = sum_{n=1}^{6} 2 cos(2 pi n x)/n^2 (six resolvable gaps)."""
    n = np.arange(1, 7)
    return PeriodicPotential(np.concatenate([[0.0], 2.0 / n ** 2]), np.zeros(0), grid_size)


@pytest.fixture(autouse=True)
def _quiet_logs():
    logger.remove()
    logger.add(lambda msg: None, level="DEBUG")
    yield


@pytest.fixture
def zero():
    return PeriodicPotential.zero(SMALL_GRID)


@pytest.fixture
def mathieu():
    return mathieu_potential()


@pytest.fixture
def sharp():
    return sharp_potential()


@pytest.fixture(scope="module")
def zero_bands():
    return find_band_edges(PeriodicPotential.zero(SMALL_GRID), 4)


@pytest.fixture(scope="module")
def mathieu_bands():
    return find_band_edges(mathieu_potential(), 6)


@pytest.fixture(scope="module")
def mathieu_raw_bands():
    return find_band_edges(mathieu_potential(), 6, normalize=False)


@pytest.fixture(scope="module")
def sharp_bands():
    return find_band_edges(sharp_potential(), 8)


@pytest.fixture(scope="module")
def zero_map(zero_bands):
    return build_map(zero_bands)


@pytest.fixture(scope="module")
def mathieu_map(mathieu_bands):
    return build_map(mathieu_bands)


@pytest.fixture(scope="module")
def sharp_map(sharp_bands):
    return build_map(sharp_bands)
