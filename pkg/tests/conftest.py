"""Shared fixtures: the scenario caches are module-level lru_cached builders,
so these fixtures only forward to them and let the cache absorb repeat use
across test modules."""

import pytest

from chirpramsey import scenarios


@pytest.fixture(scope="session")
def fig4():
    return scenarios.fig4_data()


@pytest.fixture(scope="session")
def fig5():
    return scenarios.fig5_data()


@pytest.fixture(scope="session")
def bfield():
    return scenarios.bfield_data()


@pytest.fixture(scope="session")
def fig6():
    return scenarios.fig6_data()


@pytest.fixture(scope="session")
def engines():
    return scenarios.engines_data()


@pytest.fixture(scope="session")
def invariants():
    return scenarios.invariants_data()


@pytest.fixture(scope="session")
def calibration():
    return scenarios.calibration_data()
