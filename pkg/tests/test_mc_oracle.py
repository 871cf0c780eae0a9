import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raman3d.core_model import derive_scales
from raman3d.errors import DomainError
from raman3d.mc_oracle import (SampleConfig, batch_generator, estimate_chi, estimate_F, estimate_G,
                               estimate_G_averaged, estimate_ratio_pc_p2, oracle_record, sample_positions)
from raman3d.noise_engine import averaged_correlation, chi_exact, ratio_pc_p2
from raman3d.signal_mode import mode_amplitude

from .conftest import LAMBDA0, small_cell

CFG = SampleConfig(n_samples=200_000, seed=11, batch_size=20_000)


def test_config_validation():
    for kw in ({"n_samples": 10}, {"n_samples": 10_000, "batch_size": 3000}, {"seed": -1}, {"workers": 0}):
        with pytest.raises(DomainError):
            SampleConfig(**{"n_samples": 10_000, "batch_size": 1000, **kw})


def test_sample_moments(small):
    geom, _ = small
    x, y, z = sample_positions(geom, CFG)
    n = CFG.n_samples
    R0, L = geom.radius_R0, geom.length_L
    # x, y ~ N(0, R0²/2); z ~ U(-L/2, L/2)
    for v, var in ((x, R0**2 / 2), (y, R0**2 / 2), (z, L**2 / 12)):
        assert abs(v.mean()) < 5 * math.sqrt(var / n)
        assert v.var() == pytest.approx(var, rel=0.02)
    assert np.all(np.abs(z) <= L / 2)


def test_streams_are_per_batch_and_deterministic():
    a = batch_generator(7, 3).random(5)
    assert np.array_equal(a, batch_generator(7, 3).random(5))
    assert not np.array_equal(a, batch_generator(7, 4).random(5))
    assert not np.array_equal(a, batch_generator(8, 3).random(5))


def test_results_independent_of_worker_count(small):
    one = estimate_F(2e-2, 0.3, *small, CFG)
    four = estimate_F(2e-2, 0.3, *small, SampleConfig(CFG.n_samples, CFG.seed, CFG.batch_size, workers=4))
    assert one == four


def test_forward_amplitude_is_exact(small):
    est = estimate_F(0.0, 0.0, *small, CFG)
    assert est.mean == 1.0 and est.std_error == 0.0


@pytest.mark.parametrize("theta,phi", [(0.02, 0.0), (0.05, 0.7), (0.1, 2.0)])
def test_amplitude_matches_closed_form(theta, phi, small):
    est = estimate_F(theta, phi, *small, CFG)
    assert abs(est.z_score(mode_amplitude(theta, *small))) < 4
    assert abs(est.mean.imag) < 4 * est.std_error_imag


def test_amplitude_thin_cylinder_limit():
    # R0 → 0: the transverse phase vanishes, only the axial sinc survives
    geom, pump = small_cell(k0R0=1e-3)
    theta = 0.07
    est = estimate_F(theta, 1.1, geom, pump, CFG)
    k0L = derive_scales(geom, pump).k0L
    assert abs(est.z_score(np.sinc(k0L * math.sin(theta / 2) ** 2 / math.pi))) < 4


def test_correlation_diagonal_and_symmetry(small):
    same = estimate_G(0.04, 0.04, 0.0, *small, CFG)
    assert same.mean == 1.0
    g = estimate_G(0.03, 0.05, 0.4, *small, CFG)
    h = estimate_G(0.05, 0.03, -0.4, *small, CFG)
    # the swap flips k - k' and rotates the frame, so the two agree as conjugates in distribution
    assert abs(g.mean.real - h.mean.real) < 4 * math.hypot(g.std_error, h.std_error)
    assert abs(g.mean.imag + h.mean.imag) < 4 * math.hypot(g.std_error_imag, h.std_error_imag)


def test_mean_intensity_finite_pump():
    geom, pump = small_cell(r0=20.0 / (2 * math.pi / LAMBDA0))
    est = estimate_G(0.0, 0.0, 0.0, geom, pump, CFG)
    assert abs(est.z_score(derive_scales(geom, pump).mean_intensity)) < 4


@pytest.mark.parametrize("r0", [math.inf, 20.0 / (2 * math.pi / LAMBDA0)])
def test_azimuth_averaged_correlation(r0):
    geom, pump = small_cell(r0=r0)
    s = derive_scales(geom, pump)
    est = estimate_G_averaged(0.03, 0.06, geom, pump, CFG)
    assert abs(est.z_score(averaged_correlation(0.03, 0.06, s))) < 4


def test_ratio_against_closed_form(small):
    est = estimate_ratio_pc_p2(*small, CFG)
    r = ratio_pc_p2(*small)
    assert abs(est.z_score(r / (1 - r))) < 3


def test_chi_against_closed_form(small):
    est = estimate_chi(*small, CFG)
    assert abs(est.z_score(chi_exact(*small))) < 3


def test_error_shrinks_with_samples(small):
    a = estimate_F(0.05, 0.2, *small, SampleConfig(100_000, 5, 20_000))
    b = estimate_F(0.05, 0.2, *small, SampleConfig(200_000, 5, 20_000))
    assert b.std_error / a.std_error == pytest.approx(1 / math.sqrt(2), rel=0.05)


@settings(max_examples=10)
@given(st.integers(0, 2**32), st.floats(0.0, 0.3))
def test_standard_errors_nonnegative(seed, theta):
    est = estimate_F(theta, 0.5, *small_cell(), SampleConfig(2000, seed, 1000))
    assert est.std_error >= 0.0 and est.std_error_imag >= 0.0


def test_oracle_record_fields(small):
    rec = oracle_record("F", estimate_F(0.0, 0.0, *small, SampleConfig(2000, 0, 1000)), 1.0)
    assert rec["z"] == 0.0 and rec["estimate"] == 1.0 and rec["n"] == 2000


def test_correlation_even_in_azimuth(small):
    plus = estimate_G(0.03, 0.05, 0.9, *small, CFG)
    minus = estimate_G(0.03, 0.05, -0.9, *small, CFG)
    assert abs(plus.mean.real - minus.mean.real) < 4 * math.hypot(plus.std_error, minus.std_error)


@pytest.mark.parametrize("r0", [math.inf, 20.0 / (2 * math.pi / LAMBDA0)])
def test_sampled_variance_nonnegative(r0):
    geom, pump = small_cell(r0=r0)
    cfg = SampleConfig(20_000, 2, 5000)
    mean_u2 = estimate_G(0.0, 0.0, 0.0, geom, pump, cfg).mean.real
    for theta in (0.0, 0.01, 0.05, 0.2, 1.0, math.pi):
        f = estimate_F(theta, 0.3, geom, pump, cfg).mean
        assert mean_u2 - abs(f) ** 2 >= -1e-15
