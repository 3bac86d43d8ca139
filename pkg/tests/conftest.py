import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from weakreal.hilbert import Ket, Subsystem
from weakreal.weakvalue import PPSPair

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def box_space(d, sid="box"):
    return (Subsystem(sid, tuple(str(i + 1) for i in range(d))),)


def random_pps(rng, d, min_overlap=0.05):
    """Random unit pre/post-selection with |<phi|psi>| bounded away from 0."""
    while True:
        a = rng.normal(size=d) + 1j * rng.normal(size=d)
        b = rng.normal(size=d) + 1j * rng.normal(size=d)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        if abs(np.vdot(b, a)) > min_overlap:
            sp = box_space(d)
            return PPSPair(Ket(sp, a), Ket(sp, b))


@st.composite
def pps_pairs(draw, min_dim=2, max_dim=6):
    d = draw(st.integers(min_dim, max_dim))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_pps(np.random.default_rng(seed), d)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance_line():
    def record(number, passed, text):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {text}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
