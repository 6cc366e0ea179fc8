import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

FOUR = np.array([[2.0, 2.0], [1.0, 3.0], [0.0, 0.0], [1.0, 1.0]])


@pytest.fixture
def four_points():
    """(2,2), (1,3) on the frontier; (1,1) second stratum; (0,0) third."""
    return FOUR.copy()


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
