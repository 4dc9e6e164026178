import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hadamard_swap import DecisionRule, GroupSpec, distribution  # noqa: E402

ACCEPTANCE_RESULTS = {}


@lru_cache(maxsize=None)
def group_setup(factors):
    """(rule, unitary, distribution) for a group, computed once per session."""
    rule = DecisionRule.from_group(GroupSpec(factors))
    u = rule.unitary()
    return rule, u, distribution(u)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {key:>2}: {detail}")
