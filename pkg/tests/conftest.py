import numpy as np
import pytest

from excitonwalk import BathSpec, NetworkSpec, build_model, initial_state, load_fmo


@pytest.fixture(scope="session")
def fmo():
    return load_fmo()


@pytest.fixture(scope="session")
def fmo_sm(fmo):
    net, bath = fmo
    return build_model(net, bath)


@pytest.fixture(scope="session")
def fmo_mix():
    return initial_state("mixture", 7, [0, 5])


def random_network(rng, n=None, trap=True, loss=1e-3):
    n = n or int(rng.integers(3, 6))
    energies = rng.uniform(0, 300, n)
    v = np.triu(rng.uniform(-100, 100, (n, n)), 1)
    traps = np.zeros(n)
    if trap:
        traps[rng.integers(n)] = rng.uniform(0.5, 2.0)
    return NetworkSpec(energies, v + v.T, traps, loss)


def random_bath(rng):
    return BathSpec(temperature=rng.uniform(50, 350), reorg_energy=rng.uniform(5, 60),
                    cutoff=rng.uniform(80, 250))


def dimer(split=0.0, coupling=50.0, traps=(0.0, 0.0), loss=0.0):
    return NetworkSpec([split, 0.0], [[0, coupling], [coupling, 0]], list(traps), loss)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
