import numpy as np
import pytest

from affine_rag.synth import random_linear


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_centered(rng, d, n):
    x = rng.standard_normal((d, n))
    return x - x.mean(axis=1, keepdims=True)


def conditioned_map(rng, d, max_cond=10.0):
    return random_linear(d, rng.uniform(1.0, max_cond), rng)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""
    def record(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
