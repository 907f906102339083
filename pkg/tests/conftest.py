import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from uvlab.distributions import BUILTINS, get_distribution
from uvlab.errors import MissingModelData
from uvlab.kernels import CATALOGUE, make_kernel

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def admissible_pairs():
    """(kernel name, distribution name) pairs the catalogue can build."""
    pairs = []
    for k in CATALOGUE:
        for d in sorted(BUILTINS):
            try:
                make_kernel(k, get_distribution(d))
            except MissingModelData:
                continue
            pairs.append((k, d))
    return pairs


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
