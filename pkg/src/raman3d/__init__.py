"""Noise budgets for Raman scattering in three-dimensional atomic ensembles.

The compiled kernels are used when available; ``raman3d.BACKEND`` names the
active implementation ("cython" or "python").
"""

__version__ = "0.1.0"

from ._backend import kernels as _kernels
from .core_model import (DerivedScales, EnsembleGeometry, PumpBeam, derive_scales, estimate_Na_pc_over_p2,
                         geometry_from_targets, p_spon_fit)
from .errors import (ConfigError, ConvergenceError, DomainError, NoSolution, NumericalInstability, Raman3DError,
                     ReproductionMismatch)
from .noise_engine import (Matching, MatchingStrategy, NoiseBudget, chi_exact, chi_simple, collective_enhancement,
                           noise_budget, optimize_theta_d, ratio_pc_p2, single_atom_budget)
from .protocol import ProtocolMetrics, ProtocolParams, mixed_state_fidelity, required_pc, success_metrics
from .quadrature import QuadratureSpec, QuadResult, bessel_i0_scaled, integrate_1d, integrate_2d, sinc
from .signal_mode import ModeProfile, mode_amplitude, mode_norm_integral, mode_profile

BACKEND = _kernels.NAME

__all__ = [
    "BACKEND", "ConfigError", "ConvergenceError", "DerivedScales", "DomainError", "EnsembleGeometry", "Matching",
    "MatchingStrategy", "ModeProfile", "NoSolution", "NoiseBudget", "NumericalInstability", "ProtocolMetrics",
    "ProtocolParams", "PumpBeam", "QuadResult", "QuadratureSpec", "Raman3DError", "ReproductionMismatch",
    "bessel_i0_scaled", "chi_exact", "chi_simple", "collective_enhancement", "derive_scales",
    "estimate_Na_pc_over_p2", "geometry_from_targets", "integrate_1d", "integrate_2d", "mixed_state_fidelity",
    "mode_amplitude", "mode_norm_integral", "mode_profile", "noise_budget", "optimize_theta_d", "p_spon_fit",
    "ratio_pc_p2", "required_pc", "single_atom_budget", "sinc", "success_metrics",
]
