import numpy as np
import pytest

from structbandits import bernoulli_model, gaussian_model

ACCEPTANCE_LINES = []


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def bernoulli():
    return bernoulli_model()


@pytest.fixture
def gaussian():
    return gaussian_model()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def has_compiled_backend():
    from structbandits import get_backend
    try:
        get_backend("compiled")
    except RuntimeError:
        return False
    return True


requires_compiled = pytest.mark.skipif(
    not has_compiled_backend(),
    reason="compiled kernels were not built")
