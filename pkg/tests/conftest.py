import math

import numpy as np
import pytest

DELTA2 = math.sqrt(3) / 2
# hexagonal critical lattice (columns are generators)
G0 = np.array([[1 / math.sqrt(DELTA2), 1 / (2 * math.sqrt(DELTA2))], [0.0, math.sqrt(DELTA2)]])

_ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def acceptance():
    """Record one summary line per acceptance criterion."""
    def record(number: int, ok: bool, detail: str):
        line = f"ACCEPTANCE {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
