import numpy as np
import pytest

from trotter_kato import seeding
from trotter_kato.products import make_pair


def series_exp(m, terms=40):
    """Truncated exponential series, the independent oracle for exp(m)."""
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ m / k
        out = out + term
    return out


@pytest.fixture
def psd4():
    return seeding.random_psd(4, 7)


@pytest.fixture(scope="session")
def pair8():
    a, b = seeding.random_pair(8, 42)
    return make_pair(a, b)


@pytest.fixture(scope="session")
def zeno_pair8():
    a, b = seeding.random_pair(8, 42)
    return make_pair(a, b, seeding.random_projection(8, 4, 42))


@pytest.fixture(scope="session")
def h8():
    return seeding.random_unit_vector(8, 42)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "GATE_LINES", None)
    if lines:
        terminalreporter.section("acceptance gate")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
