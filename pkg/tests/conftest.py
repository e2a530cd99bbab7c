import math

import pytest
from scipy import integrate

from prodsup.model import make_config
from prodsup.montecarlo import McSettings, default_seed

_ACCEPTANCE_LINES = []


def record_acceptance(label, passed, detail=""):
    _ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}" + (f"  ({detail})" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def ref_cfg():
    """N_d = 2, N_s = M = 4, T_d = 5."""
    return make_config(2, 4, 5)


@pytest.fixture
def mc():
    return McSettings(n_samples=10_000, root_seed=default_seed())


@pytest.fixture(scope="session")
def exp_e1_one():
    """int_0^inf ln(1 + x) e^{-x} dx = e E_1(1), by quadrature."""
    value, _ = integrate.quad(lambda x: math.log1p(x) * math.exp(-x), 0, math.inf)
    return value
