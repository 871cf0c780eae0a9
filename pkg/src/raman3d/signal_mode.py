"""Angular structure of the signal mode for a Gaussian cell and Gaussian pump.

f(θ) = [r0²/(r0²+R0²)] · exp(-(k0 r_eff sinθ)²/4) · sinc(k0 L sin²(θ/2))

The azimuthal dependence vanishes and the z-average over the symmetric
interval [-L/2, L/2] is real, so the amplitude is a real function of θ only.
Arbitrary atom distributions are not handled here; see :mod:`raman3d.mc_oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _backend
from .core_model import DerivedScales, EnsembleGeometry, PumpBeam, derive_scales
from .errors import ConvergenceError, DomainError
from .quadrature import QuadratureSpec, QuadResult, graded_breakpoints, sinc


@dataclass(frozen=True)
class ModeProfile:
    thetas: tuple
    amplitudes: tuple
    characteristic_angle: float

    def rows(self):
        return list(zip(self.thetas, self.amplitudes))


def _check_angle(theta):
    arr = np.asarray(theta, dtype=float)
    if np.any(arr < 0) or np.any(arr > math.pi) or np.any(np.isnan(arr)):
        raise DomainError("polar angle must lie in [0, pi]")
    return arr


def amplitude_from_scales(theta, scales: DerivedScales):
    theta = _check_angle(theta)
    s = np.sin(theta)
    h = np.sin(0.5 * theta)
    out = scales.amplitude_prefactor * np.exp(-0.25 * scales.k0_reff_sq * s * s) * sinc(scales.k0L * h * h)
    return out[()] if np.ndim(out) == 0 else out


def mode_amplitude(theta, geom: EnsembleGeometry, pump: PumpBeam):
    """Signal-mode amplitude at polar angle ``theta`` (scalar or array)."""
    return amplitude_from_scales(theta, derive_scales(geom, pump))


def mode_profile(geom: EnsembleGeometry, pump: PumpBeam, n_points: int = 64) -> ModeProfile:
    """Sample the amplitude over the forward cone [0, min(π, 10 θ_f)].

    The grid is quadratically graded (denser near θ = 0).
    """
    if n_points < 16:
        raise DomainError("mode_profile needs at least 16 points")
    scales = derive_scales(geom, pump)
    top = min(math.pi, 10.0 * scales.theta_f)
    thetas = top * np.linspace(0.0, 1.0, n_points) ** 2
    amps = amplitude_from_scales(thetas, scales)
    return ModeProfile(tuple(float(t) for t in thetas), tuple(float(a) for a in amps), scales.theta_f)


def characteristic_angle(scales: DerivedScales) -> float:
    """min(√(r0²+R0²)/(k0 r0 R0), 1/√(k0 L)); identical to θ_f."""
    return min(1.0 / math.sqrt(scales.k0_reff_sq), 1.0 / math.sqrt(scales.k0L))


def cone_integral(scales: DerivedScales, theta_max: float, spec: QuadratureSpec) -> QuadResult:
    """∫₀^θmax sinθ exp(-(k0 r_eff sinθ)²/2) sinc²(k0L sin²(θ/2)) dθ.

    Evaluated in units of θ_f so the tolerances act on an O(1) quantity, then
    rescaled.  Cached on the integrand parameters only, so sweeps over the
    density reuse it.
    """
    if not (0.0 < theta_max <= math.pi):
        raise DomainError("theta_max must lie in (0, pi]")
    return _cone_cached(scales.k0L, 0.5 * scales.k0_reff_sq, scales.theta_f, float(theta_max), spec)


@lru_cache(maxsize=4096)
def _cone_cached(k0L, gauss, scale, theta_max, spec):
    edges = graded_breakpoints(0.0, theta_max / scale, spec.initial_panels, 1.0)
    val, err, nev, ok = _backend.kernels.cone_integral(
        k0L, gauss, scale, edges, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
    unit = scale * scale
    if not ok:
        raise ConvergenceError("cone integral did not converge", val * unit, err * unit, nev)
    return QuadResult(val * unit, err * unit, nev)


def mode_norm_integral(geom: EnsembleGeometry, pump: PumpBeam, theta_max: float,
                       spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Angular norm of the signal mode inside the cone θ ≤ theta_max (θ-part only)."""
    return cone_integral(derive_scales(geom, pump), float(theta_max), spec).value
