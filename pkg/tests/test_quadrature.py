import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import sici

from raman3d import _backend
from raman3d.errors import ConvergenceError, DomainError
from raman3d.quadrature import (QuadratureSpec, bessel_i0_scaled, graded_breakpoints, integrate_1d, integrate_2d,
                                sinc)

BACKENDS = sorted(_backend.available_backends().items())


def test_sinc_at_zero_and_near_cutoff():
    assert sinc(0.0) == 1.0
    for x in (1e-12, 9.9e-5, 1.01e-4, 0.3, 17.0):
        assert sinc(x) == pytest.approx(float(mpmath.sin(x) / x), rel=1e-15, abs=1e-300)


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_sinc_even_and_bounded(x):
    assert sinc(x) == sinc(-x)
    assert abs(sinc(x)) <= 1.0


def test_sinc_array_matches_scalar():
    xs = np.array([0.0, 1e-5, 0.5, 10.0])
    assert np.array_equal(sinc(xs), np.array([sinc(x) for x in xs]))


@pytest.mark.parametrize("x", [0.0, 1e-8, 1e-3, 0.5, 1.0, 10.0, 700.0, 1e4, 1e8])
def test_scaled_bessel_against_mpmath(x):
    ref = mpmath.besseli(0, x) * mpmath.exp(-x)
    assert bessel_i0_scaled(x) == pytest.approx(float(ref), rel=1e-13)


def test_scaled_bessel_rejects_negative():
    with pytest.raises(DomainError):
        bessel_i0_scaled(-1.0)


@given(st.floats(0, 1e9), st.floats(0, 1e9))
def test_scaled_bessel_bounded_and_decreasing(a, b):
    lo, hi = sorted((a, b))
    va, vb = bessel_i0_scaled(lo), bessel_i0_scaled(hi)
    assert 0.0 < vb <= va <= 1.0


@given(st.integers(0, 29), st.floats(-3, 3), st.floats(0.1, 4))
def test_polynomials_integrate_exactly(deg, a, width):
    b = a + width
    got = integrate_1d(lambda x: x**deg, a, b).value
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    assert got == pytest.approx(exact, rel=1e-10, abs=1e-12)


def test_oscillatory_integral():
    # ∫0^50 cos(40 x) dx = sin(2000)/40
    r = integrate_1d(lambda x: np.cos(40 * x), 0.0, 50.0, QuadratureSpec(rel_tol=1e-10, abs_tol=1e-14))
    assert r.value == pytest.approx(math.sin(2000.0) / 40, rel=1e-8)
    assert r.error_estimate < 1e-9


def test_separable_double_integral():
    r = integrate_2d(lambda x, y: np.exp(-x) * np.cos(y) * np.ones_like(y), ((0.0, 2.0), (0.0, 1.0)))
    assert r.value == pytest.approx((1 - math.exp(-2)) * math.sin(1.0), rel=1e-9)


def test_convergence_error_carries_best_value():
    spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=8, initial_panels=4)
    with pytest.raises(ConvergenceError) as info:
        integrate_1d(lambda x: np.sin(500 * x) ** 2, 0.0, 10.0, spec)
    assert math.isfinite(info.value.value)
    assert info.value.evaluations > 0


@given(st.floats(0, 5), st.floats(0.1, 1e4), st.integers(4, 128), st.floats(1e-3, 10))
def test_graded_breakpoints_cover_interval(a, width, n, scale):
    e = graded_breakpoints(a, a + width, n, scale)
    assert e[0] == a and e[-1] == a + width
    assert np.all(np.diff(e) > 0)
    assert len(e) == n + 1


def _sinc2_cone(k0L, theta_max):
    # ∫0^θm sinθ sinc²(k0L sin²(θ/2)) dθ = (2/k0L) ∫0^X sinc² = (2/k0L)(Si(2X) - sin²X / X), X = k0L sin²(θm/2)
    X = k0L * math.sin(0.5 * theta_max) ** 2
    return 2.0 / k0L * (sici(2 * X)[0] - math.sin(X) ** 2 / X)


@pytest.mark.parametrize("name,mod", BACKENDS)
@pytest.mark.parametrize("k0L,theta_max", [(500.0, math.pi), (500.0, 0.3), (8e4, 0.01), (8e4, math.pi)])
def test_kernel_cone_integral_matches_sine_integral(name, mod, k0L, theta_max):
    scale = 1.0 / math.sqrt(k0L)
    edges = graded_breakpoints(0.0, theta_max / scale, 64, 1.0)
    val, err, _, ok = mod.cone_integral(k0L, 0.0, scale, edges, 1e-14, 1e-11, 10**6)
    assert ok
    assert val * scale**2 == pytest.approx(_sinc2_cone(k0L, theta_max), rel=1e-9)
