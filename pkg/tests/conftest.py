import numpy as np
import pytest

from ptssh import HybridChainSpec

# one verdict line per acceptance gate, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance gate")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)


@pytest.fixture(scope="session")
def full_chain():
    """220-site chain, gain-loss segment on sites 101-120."""
    return HybridChainSpec(n_sites=220, v=0.1, w=0.4, u_re=-0.3, u_im=0.1,
                           pt_first_site=101, pt_last_site=120)


@pytest.fixture(scope="session")
def small_chain():
    """Same physics at 60 sites; fast enough for per-test rebuilds."""
    return HybridChainSpec(n_sites=60, v=0.1, w=0.4, u_re=-0.3, u_im=0.1,
                           pt_first_site=27, pt_last_site=32)
