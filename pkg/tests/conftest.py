"""Shared fixtures: the lambda = 3 pipeline is built once per session."""

import numpy as np
import pytest

from kisspoly import solve_boutroux
from kisspoly.parametrix import Parametrix, PeriodEngine
from kisspoly.trajectories import build_critical_graph, gamma_hat


@pytest.fixture(scope="session")
def curve3():
    return solve_boutroux(3.0)


@pytest.fixture(scope="session")
def graph3(curve3):
    return build_critical_graph(curve3)


@pytest.fixture(scope="session")
def ghat3(curve3, graph3):
    return gamma_hat(curve3, graph3)


@pytest.fixture(scope="session")
def pmx3(graph3, ghat3):
    return Parametrix(graph3, ghat3)


@pytest.fixture(scope="session")
def engine3(curve3):
    return PeriodEngine(curve3)


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: heavier end-to-end checks")
