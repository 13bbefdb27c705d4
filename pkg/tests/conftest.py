import numpy as np
import pytest

from iontomo import fock


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_density(rng, n, rank=None, support=None):
    """Random mixed state of the given rank on the lowest ``support`` levels."""
    support = n if support is None else support
    rank = support if rank is None else rank
    g = np.zeros((n, rank), complex)
    g[:support] = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    rho = g @ g.conj().T
    return fock.IonState.density(rho / np.trace(rho).real, fock.vib_space(n))


def random_pure(rng, n, support=None):
    support = n if support is None else support
    v = np.zeros(n, complex)
    v[:support] = rng.normal(size=support) + 1j * rng.normal(size=support)
    return fock.IonState.pure(v / np.linalg.norm(v), fock.vib_space(n))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
