import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def uniform_32apsk():
    from shapedapsk.constellation import build_apsk
    return build_apsk()


@pytest.fixture(scope="session")
def shaped_32apsk():
    from shapedapsk.constellation import build_apsk
    return build_apsk(msb_partition_priors=(0.8125, 0.1875))


@pytest.fixture(scope="session")
def small_code():
    """Rate-9/14 code with [2,3,14] on 56 bits."""
    from shapedapsk.ldpc import build_eira_matrix, solve_degree_fractions
    dist = solve_degree_fractions("9/14", 10, (2, 3, 14))
    return build_eira_matrix(dist, 56, seed=3)


@pytest.fixture(scope="session")
def medium_code():
    from shapedapsk.ldpc import build_eira_matrix, solve_degree_fractions
    dist = solve_degree_fractions("3/5", 11, (2, 4, 19))
    return build_eira_matrix(dist, 2000, seed=1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[n])
