import sys
from pathlib import Path

import numpy as np
import pytest

from dmic.channel import Dmc, compose_zic, validate_channel
from dmic.reference import example1, example2

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"


@pytest.fixture(scope="session")
def ex1():
    return example1()


@pytest.fixture(scope="session")
def ex2():
    return example2()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def bsc(p):
    return Dmc([[1 - p, p], [p, 1 - p]])


def random_dmc(rng, n_in, n_out):
    return Dmc(rng.dirichlet(np.ones(n_out), size=n_in))


def random_zic(rng, n1, n2, m1, m2):
    """Physically degraded one-sided channel with random factors."""
    return compose_zic(random_dmc(rng, n2, m2), random_dmc(rng, n1 * m2, m1))


def random_stochastic_only(rng, n1, n2, m1, m2):
    """Degraded in marginals only: Y1 and Y2 conditionally independent given the inputs."""
    py2 = rng.dirichlet(np.ones(m2), size=n2)
    q = rng.dirichlet(np.ones(m1), size=(n1, m2))
    py1 = np.einsum("bt,atc->abc", py2, q)
    return validate_channel(np.einsum("abc,bt->abct", py1, py2))


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {detail}")
