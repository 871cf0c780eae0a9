import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from raman3d.core_model import derive_scales
from raman3d.errors import DomainError
from raman3d.quadrature import QuadratureSpec
from raman3d.signal_mode import (amplitude_from_scales, characteristic_angle, cone_integral, mode_amplitude,
                                 mode_norm_integral, mode_profile)

from .conftest import small_cell

# ∫0^θm sinθ exp(-(k0R0 sinθ)²/2) sinc²(k0L sin²(θ/2)) dθ from mpmath.quad at 30 digits,
# split at every zero of the sinc factor
MPMATH_CONE = {
    ("small", math.pi): 0.002081095241315317,
    ("small", 0.05): 0.0009743114123144459,
    ("table", 0.002): 1.715224907722274e-6,
    ("table", math.pi): 6.124417961648783e-6,
}


@pytest.mark.parametrize("cell,theta_max", list(MPMATH_CONE))
def test_cone_integral_against_mpmath(cell, theta_max, small, table_cell):
    geom, pump = small if cell == "small" else table_cell
    got = mode_norm_integral(geom, pump, theta_max)
    assert got == pytest.approx(MPMATH_CONE[(cell, theta_max)], rel=1e-9)


def test_forward_amplitude_is_pump_overlap():
    geom, pump = small_cell(r0=20.0 / (2 * math.pi / 0.8e-4))  # r0 = R0
    assert mode_amplitude(0.0, geom, pump) == pytest.approx(0.5)
    geom, pump = small_cell()
    assert mode_amplitude(0.0, geom, pump) == 1.0


def test_amplitude_closed_form(small):
    s = derive_scales(*small)
    th = np.array([0.01, 0.05, 0.2, 1.0, math.pi])
    expected = np.exp(-0.25 * 400 * np.sin(th) ** 2) * np.sinc(500 * np.sin(th / 2) ** 2 / math.pi)
    assert np.allclose(amplitude_from_scales(th, s), expected, rtol=1e-13, atol=1e-300)


@pytest.mark.parametrize("theta", [-1e-9, math.pi + 1e-9, math.nan])
def test_amplitude_domain(theta, small):
    with pytest.raises(DomainError):
        mode_amplitude(theta, *small)


def test_forward_concentration(table_cell):
    s = derive_scales(*table_cell)
    full = mode_norm_integral(*table_cell, math.pi)
    cone = mode_norm_integral(*table_cell, 10 * s.theta_f)
    assert cone == pytest.approx(full, rel=1e-4)


@given(st.floats(1e-4, math.pi), st.floats(1e-4, math.pi))
def test_norm_monotone_in_cone(a, b):
    cell = small_cell()
    lo, hi = sorted((a, b))
    assert mode_norm_integral(*cell, lo) <= mode_norm_integral(*cell, hi) * (1 + 1e-12)


@given(st.floats(0, math.pi))
def test_amplitude_bounded_by_forward_value(theta):
    geom, pump = small_cell(r0=1e-3)
    s = derive_scales(geom, pump)
    assert abs(amplitude_from_scales(theta, s)) <= s.amplitude_prefactor


def test_profile_grid(table_cell):
    prof = mode_profile(*table_cell, n_points=32)
    s = derive_scales(*table_cell)
    assert len(prof.thetas) == 32 and prof.thetas[0] == 0.0
    assert prof.thetas[-1] == pytest.approx(10 * s.theta_f)
    assert prof.amplitudes[0] == 1.0
    assert prof.characteristic_angle == characteristic_angle(s) == s.theta_f
    with pytest.raises(DomainError):
        mode_profile(*table_cell, n_points=4)


def test_cone_integral_rejects_bad_limit(small):
    with pytest.raises(DomainError):
        cone_integral(derive_scales(*small), 0.0, QuadratureSpec())
