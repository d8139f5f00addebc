import numpy as np
import pytest
from hypothesis import settings

from qgaudin import spin

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def random_system(rng, n_sites, spins=(0.5, 1.0), spread=3.0, min_gap=0.3):
    """Random spin system with well-separated real site parameters."""
    while True:
        u = np.sort(rng.uniform(-spread, spread, size=n_sites))
        if n_sites < 2 or np.min(np.diff(u)) > min_gap:
            break
    s = tuple(float(rng.choice(spins)) for _ in range(n_sites))
    return spin.SpinSystem(s, tuple(float(x) for x in rng.permutation(u)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def half3():
    return spin.SpinSystem((0.5, 0.5, 0.5), (0.0, 1.1, -0.6))


@pytest.fixture
def mixed3():
    return spin.SpinSystem((0.5, 1.0, 0.5), (-0.7, 0.4, 1.9))


ACCEPTANCE: list[str] = []


def record(criterion: str, passed: bool, detail: str) -> None:
    """Collect one acceptance line; the terminal summary prints them all."""
    ACCEPTANCE.append(f"{'PASS' if passed else 'FAIL'} [{criterion}] {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
