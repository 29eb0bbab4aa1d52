import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def chain3():
    from orderclust.poset import transitive_closure
    return transitive_closure([(0, 1), (1, 2)], 3)


@pytest.fixture
def two_chains():
    """a<b and c<d with a, b, c, d = 0, 1, 2, 3."""
    from orderclust.poset import transitive_closure
    return transitive_closure([(0, 1), (2, 3)], 4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import report
    if report.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(report.LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
