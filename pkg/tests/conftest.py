import numpy as np
import pytest
from hypothesis import strategies as st

from subcpp import BaseCPP, Deterministic, Exponential, Gamma, Pareto, RiskModel, Subordinator, SubordinatedCPP
from subcpp.subordinator import CompoundPoissonJumps, GammaJumps

ACCEPTANCE_LINES: list[str] = []


def drifted_sub():
    """Clock t/2 plus a rate-1 Poisson stream of jumps of size 1/2."""
    return Subordinator.compound_poisson(0.5, 1.0, Deterministic(0.5))


def clustered_sub():
    return Subordinator.compound_poisson(0.2, 0.08, Exponential(0.1))


def expjump_sub(rate):
    """Pure jump clock with Exp(rate) jumps at intensity rate: E[Lambda_1] = 1."""
    return Subordinator.compound_poisson(0.0, rate, Exponential(rate))


def pareto_sub(eps):
    return Subordinator.compound_poisson(0.9, 1.0, Pareto(0.1 * eps / (1 + eps), 1 + eps))


def cpp(rate=1.0, law=None, sub=None):
    return SubordinatedCPP(BaseCPP(rate, law or Exponential(1.0)), sub or Subordinator.identity())


@st.composite
def normalized_subordinators(draw):
    """Random subordinators with E[Lambda_1] = 1 across every supported family."""
    drift = draw(st.floats(0.0, 0.95))
    rest = 1.0 - drift
    family = draw(st.sampled_from(["exp", "gamma_law", "det", "pareto", "gamma_proc"]))
    if family == "gamma_proc":
        shape = draw(st.floats(0.05, 20.0))
        return Subordinator(drift, GammaJumps(shape, shape / rest))
    rate = draw(st.floats(0.05, 10.0))
    mean_jump = rest / rate
    if family == "exp":
        law = Exponential(1.0 / mean_jump)
    elif family == "gamma_law":
        k = draw(st.floats(0.2, 8.0))
        law = Gamma(k, k / mean_jump)
    elif family == "det":
        law = Deterministic(mean_jump)
    else:
        a = draw(st.floats(1.1, 6.0))
        law = Pareto(mean_jump * (a - 1.0) / a, a)
    return Subordinator(drift, CompoundPoissonJumps(rate, law))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def drifted():
    return cpp(1.0, Exponential(1.0), drifted_sub())


@pytest.fixture
def clustered():
    return cpp(1.0, Exponential(1.0), clustered_sub())


@pytest.fixture
def expjump_model():
    return RiskModel(2.5, cpp(2.0, Exponential(2.0), expjump_sub(0.5)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

