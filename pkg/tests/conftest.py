import numpy as np
import pytest
from hypothesis import strategies as st

from rieffel_fields import TrigPoly


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def trigpolys(dim=2, degree=3, max_terms=6):
    """Hypothesis strategy for small TrigPolys with unimodular-ish coefficients."""
    key = st.tuples(*[st.integers(-degree, degree)] * dim)
    coeff = st.builds(complex, st.floats(-1, 1, allow_nan=False), st.floats(-1, 1, allow_nan=False))
    return st.dictionaries(key, coeff, max_size=max_terms).map(lambda d: TrigPoly(dim, d))


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict(capsys):
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def emit(number: int, title: str, passed: bool, detail: str) -> None:
        line = f"ACCEPTANCE {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
