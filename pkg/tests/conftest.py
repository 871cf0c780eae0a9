import math

import pytest
from hypothesis import settings

from raman3d.core_model import EnsembleGeometry, PumpBeam, geometry_from_targets

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")

LAMBDA0 = 0.8e-4  # cm
K0 = 2.0 * math.pi / LAMBDA0

# lines collected by test_acceptance and printed at the end of the session
ACCEPTANCE_LINES = []


def small_cell(k0L=500.0, k0R0=20.0, n_atoms=1e3, r0=math.inf):
    L = k0L / K0
    R0 = k0R0 / K0
    return EnsembleGeometry(L, R0, n_atoms / (math.pi * R0 * R0 * L)), PumpBeam(LAMBDA0, r0)


@pytest.fixture
def small():
    return small_cell()


@pytest.fixture
def table_cell():
    """Fr = 1, d_o = 1.9e3, L = 1 cm, broad pump."""
    return geometry_from_targets(1.9e3, 1.0, 1.0, LAMBDA0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
