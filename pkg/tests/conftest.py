import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from idfield.basis import Window
from idfield.catalog import catalog
from idfield.kernels import Box

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def unit():
    return Window.unit(1)


@pytest.fixture
def full_box():
    # equals 1 on the whole unit window for t = 0.5
    return Box((0.5,))


@pytest.fixture(params=sorted(catalog()))
def catalog_triplet(request):
    return request.param, catalog()[request.param]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
