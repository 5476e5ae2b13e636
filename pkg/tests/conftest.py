import numpy as np
import pytest

from twotier import Deployment, Scenario, grid, load_preset
from twotier.optimizer import random_deployment

# one line per acceptance criterion, echoed in the terminal summary
CRITERIA = []


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(CRITERIA, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)


@pytest.fixture
def record():
    def _record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        CRITERIA.append(line)
        print(line)
        return ok
    return _record


@pytest.fixture(scope="session")
def wsn1():
    return load_preset("wsn1")[0]


@pytest.fixture(scope="session")
def wsn2():
    return load_preset("wsn2")[0]


@pytest.fixture
def coarse():
    return grid(64)


@pytest.fixture
def square():
    """Two equal-weight APs, one FC, on the 10 x 10 square."""
    return Scenario(omega=[[0, 0], [10, 0], [10, 10], [0, 10]], a=[1.0, 1.0], b=[[1.0], [1.0]],
                    beta=0.0)


@pytest.fixture
def unit_square():
    return Scenario(omega=[[0, 0], [1, 0], [1, 1], [0, 1]], a=[1.0], b=[[1.0]], beta=1.0)


def deployments(s, count, seed=0):
    rng = np.random.default_rng(seed)
    return [random_deployment(s, rng) for _ in range(count)]


def single(p, q, t=None):
    p = np.atleast_2d(np.asarray(p, dtype=float))
    return Deployment(p, q, np.zeros(len(p), dtype=int) if t is None else t)
