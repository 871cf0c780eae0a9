"""Noise budgets for exact, filtered-exact and simple-filter mode matching.

Two angular integrals carry everything:

* the cone integral A(θm) = ∫₀^θm sinθ exp(-(k0 r_eff sinθ)²/2) sinc²(k0L sin²(θ/2)) dθ,
  which gives p_c/p_2 = ρ²(ρ²+2)/(2(ρ²+1)²) · A  (ρ = r0/R0);
* the correlation integral D(θm) = ∫∫ sinθ sinθ' W(θ,θ') sinc(k0L(h-h')) sinc(k0L h) sinc(k0L h') dθ dθ',
  h = sin²(θ/2), which gives χ = P·D/A² - 1 with P = (ρ²+1)²/(ρ²(ρ²+2)).

The azimuthal average of the pair correlation is done analytically:

    W = exp(-(k0σ)²(s-s')²/4) · i0e((k0σ)² s s'/2) · exp(-(k0 r_eff)²(s²+s'²)/4),
    σ² = r0² R0²/(r0²+2R0²),

i.e. the exponential-times-Bessel product is regrouped so every exponent is
non-positive and the Bessel function only appears in scaled form.

Filtered strategies restrict the detected mode to θ ≤ θ_D.  The spontaneous
emission loss then compares the cone-restricted N_a p_c with the unrestricted
N_a p_c + p_2; dividing through by p_2 gives

    p_spon = 1 - N_a r(θ_D) / (N_a r(π) + 1),   r(θ) = p_c|θ / p_2,

so both terms share the unrestricted p_2 normalisation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _backend
from .core_model import DerivedScales, EnsembleGeometry, PumpBeam, derive_scales
from .errors import ConvergenceError, DomainError, NoSolution, NumericalInstability
from .quadrature import QuadratureSpec, QuadResult, bessel_i0_scaled, graded_breakpoints, sinc
from .signal_mode import cone_integral

#: Ensembles smaller than this violate the large-N_a reductions of the budget formulas.
MIN_ATOMS = 1e3


class Matching(str, enum.Enum):
    EXACT = "exact"
    FILTERED_EXACT = "filtered_exact"
    SIMPLE_FILTER = "simple_filter"

    @classmethod
    def parse(cls, value) -> "Matching":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"filteredexact": "filtered_exact", "simplefilter": "simple_filter", "filtered": "filtered_exact",
                   "simple": "simple_filter"}
        key = aliases.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown matching strategy {value!r}") from None


@dataclass(frozen=True)
class MatchingStrategy:
    variant: Matching
    theta_D: float | None = None

    def __post_init__(self):
        variant = Matching.parse(self.variant)
        object.__setattr__(self, "variant", variant)
        if variant is Matching.EXACT:
            if self.theta_D is not None:
                raise DomainError("exact matching takes no filtering angle")
            return
        if self.theta_D is None:
            raise DomainError(f"{variant.value} needs a filtering angle theta_D")
        theta = float(self.theta_D)
        if not (0.0 < theta <= math.pi):
            raise DomainError("theta_D must lie in (0, pi]")
        object.__setattr__(self, "theta_D", theta)

    @classmethod
    def exact(cls):
        return cls(Matching.EXACT)

    @classmethod
    def filtered_exact(cls, theta_D):
        return cls(Matching.FILTERED_EXACT, theta_D)

    @classmethod
    def simple_filter(cls, theta_D):
        return cls(Matching.SIMPLE_FILTER, theta_D)

    @property
    def cone(self) -> float:
        return math.pi if self.theta_D is None else self.theta_D

    def label(self) -> str:
        if self.theta_D is None:
            return self.variant.value
        return f"{self.variant.value}({self.theta_D:g})"


@dataclass(frozen=True)
class NoiseBudget:
    pc_over_p2: float
    chi: float
    p_spon: float
    p_mode: float
    cone_capture: float
    Na_pc_over_p2: float
    strategy: MatchingStrategy
    error_estimate: float = field(default=0.0, compare=False)

    def as_row(self) -> dict:
        return {
            "p_spon": self.p_spon,
            "p_mode": self.p_mode,
            "chi": self.chi,
            "pc_over_p2": self.pc_over_p2,
            "cone_capture": self.cone_capture,
        }


def _scales(geom, pump) -> DerivedScales:
    return derive_scales(geom, pump)


def ratio_prefactor(scales: DerivedScales) -> float:
    """r0²(r0²+2R0²)/(2(r0²+R0²)²), equal to ½ for a broad pump."""
    q = scales.inv_rho2
    return (1.0 + 2.0 * q) / (2.0 * (1.0 + q) ** 2)


def chi_prefactor(scales: DerivedScales) -> float:
    """(r0²+R0²)²/(r0²(r0²+2R0²)), written as 1 + q²/(1+2q) with q = (R0/r0)²."""
    q = scales.inv_rho2
    return 1.0 + q * q / (1.0 + 2.0 * q)


# ---------------------------------------------------------------- closed forms used by the oracle tests

def correlation_weight(theta, theta_p, scales: DerivedScales):
    """The φ-averaged pair weight W(θ, θ') entering the χ double integral."""
    s = np.sin(np.asarray(theta, dtype=float))
    sp = np.sin(np.asarray(theta_p, dtype=float))
    c_sig = 0.25 * scales.k0_sigma_sq
    c_b = 0.25 * scales.k0_reff_sq
    out = np.exp(-c_sig * (s - sp) ** 2 - c_b * (s * s + sp * sp)) * bessel_i0_scaled(2.0 * c_sig * s * sp)
    return out[()] if np.ndim(out) == 0 else out


def averaged_correlation(theta, theta_p, scales: DerivedScales):
    """Azimuthal average of ⟨|u⊥|² exp(-i(k-k')·r)⟩ over the relative angle Δφ.

    Equal to ⟨|u⊥|²⟩ · exp(-(k0σ)²(s-s')²/4) · i0e((k0σ)² s s'/2) · sinc(k0L(h-h')).
    """
    theta = np.asarray(theta, dtype=float)
    theta_p = np.asarray(theta_p, dtype=float)
    s, sp = np.sin(theta), np.sin(theta_p)
    h, hp = np.sin(0.5 * theta) ** 2, np.sin(0.5 * theta_p) ** 2
    c_sig = 0.25 * scales.k0_sigma_sq
    out = (scales.mean_intensity * np.exp(-c_sig * (s - sp) ** 2) * bessel_i0_scaled(2.0 * c_sig * s * sp)
           * sinc(scales.k0L * (h - hp)))
    return out[()] if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- integrals

def correlation_integral(scales: DerivedScales, theta_max: float, spec: QuadratureSpec) -> QuadResult:
    """The double integral D(θm), computed in units of θ_f and rescaled by θ_f⁴."""
    if not (0.0 < theta_max <= math.pi):
        raise DomainError("theta_max must lie in (0, pi]")
    return _correlation_cached(scales.k0L, 0.25 * scales.k0_sigma_sq, 0.25 * scales.k0_reff_sq,
                               scales.theta_f, float(theta_max), spec)


@lru_cache(maxsize=1024)
def _correlation_cached(k0L, c_sig, c_b, scale, theta_max, spec):
    upper = theta_max / scale
    axis = spec.halved()
    edges = graded_breakpoints(0.0, upper, axis.initial_panels, 1.0)
    val, err, nev, ok = _backend.kernels.chi_double(
        k0L, c_sig, c_b, scale, edges, axis.abs_tol, axis.abs_tol / max(1.0, upper), axis.rel_tol,
        axis.max_subdivisions)
    unit = scale**4
    if not ok:
        raise ConvergenceError("correlation double integral did not converge", val * unit, err * unit, nev)
    return QuadResult(val * unit, err * unit, nev)


def _ratio(scales, theta_max, spec) -> QuadResult:
    a = cone_integral(scales, float(theta_max), spec)
    pre = ratio_prefactor(scales)
    return QuadResult(pre * a.value, pre * a.error_estimate, a.evaluations)


def ratio_pc_p2(geom: EnsembleGeometry, pump: PumpBeam, theta_max: float = math.pi,
                spec: QuadratureSpec = QuadratureSpec()) -> float:
    """p_c/p_2 with the detected mode confined to θ ≤ theta_max.

    The O(1/k0L) correction to the denominator is dropped, as in the
    large-k0L closed form.
    """
    return _ratio(_scales(geom, pump), theta_max, spec).value


def _chi(scales, theta_max, spec):
    a = cone_integral(scales, float(theta_max), spec)
    d = correlation_integral(scales, float(theta_max), spec)
    pre = chi_prefactor(scales)
    ratio = d.value / (a.value * a.value)
    chi = pre * ratio - 1.0
    err = pre * ratio * (d.error_estimate / abs(d.value) + 2.0 * a.error_estimate / abs(a.value))
    if chi < 0.0:
        if -chi > 10.0 * err:
            raise NumericalInstability(f"chi = {chi:.3e} is negative beyond its error bar {err:.3e}")
        chi = 0.0
    return chi, err


def chi_exact(geom: EnsembleGeometry, pump: PumpBeam, theta_max: float = math.pi,
              spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Mode-mismatch ratio χ for a detected mode restricted to θ ≤ theta_max."""
    return _chi(_scales(geom, pump), theta_max, spec)[0]


def _chi_simple(scales, theta_D, spec):
    a = cone_integral(scales, float(theta_D), spec)
    # 1/(χ_s+1) = ∫_cone |f|² dΩ / (⟨|u|²⟩ · solid angle); the ρ factors reduce to 2·ratio_prefactor
    solid = 2.0 * math.sin(0.5 * theta_D) ** 2  # 1 - cos θ_D without cancellation
    inv = 2.0 * ratio_prefactor(scales) * a.value / solid
    chi_s = 1.0 / inv - 1.0
    err = (1.0 / inv) * a.error_estimate / abs(a.value)
    if chi_s < 0.0:
        if -chi_s > 10.0 * err:
            raise NumericalInstability(f"chi_s = {chi_s:.3e} is negative beyond its error bar")
        chi_s = 0.0
    return chi_s, err


def chi_simple(geom: EnsembleGeometry, pump: PumpBeam, theta_D: float,
               spec: QuadratureSpec = QuadratureSpec()) -> float:
    """χ_s for simple filtering: every mode inside the cone θ ≤ θ_D is detected.

    For a finite pump radius the Gaussian exponent uses r_eff and the
    in-cone noise carries the weight ⟨|u⊥|²⟩ = r0²/(r0²+2R0²); the broad-pump
    limit reduces to the plain R0 form.
    """
    if not (0.0 < theta_D <= math.pi):
        raise DomainError("theta_D must lie in (0, pi]")
    return _chi_simple(_scales(geom, pump), theta_D, spec)[0]


# ---------------------------------------------------------------- budgets

def budget_from_scales(strategy: MatchingStrategy, scales: DerivedScales,
                       spec: QuadratureSpec = QuadratureSpec()) -> NoiseBudget:
    if scales.N_a < MIN_ATOMS * (1.0 - 1e-12):  # N_a = 1e3 built from lengths may round just below
        raise DomainError(f"N_a = {scales.N_a:.3g} is too small for the large-ensemble budget (need >= {MIN_ATOMS:g})")
    full = _ratio(scales, math.pi, spec)
    n_r = scales.N_a * full.value
    if strategy.variant is Matching.EXACT:
        chi, chi_err = _chi(scales, math.pi, spec)
        return NoiseBudget(
            pc_over_p2=full.value, chi=chi, p_spon=1.0 / (1.0 + n_r), p_mode=chi / (1.0 + chi),
            cone_capture=1.0, Na_pc_over_p2=n_r, strategy=strategy,
            error_estimate=chi_err + full.error_estimate / full.value,
        )
    cone = _ratio(scales, strategy.theta_D, spec)
    capture = cone.value / full.value
    p_spon = 1.0 - scales.N_a * cone.value / (n_r + 1.0)
    if strategy.variant is Matching.FILTERED_EXACT:
        chi, chi_err = _chi(scales, strategy.theta_D, spec)
    else:
        chi, chi_err = _chi_simple(scales, strategy.theta_D, spec)
    return NoiseBudget(
        pc_over_p2=full.value, chi=chi, p_spon=min(max(p_spon, 0.0), 1.0), p_mode=chi / (1.0 + chi),
        cone_capture=min(capture, 1.0), Na_pc_over_p2=n_r * min(capture, 1.0), strategy=strategy,
        error_estimate=chi_err + cone.error_estimate / cone.value + full.error_estimate / full.value,
    )


def noise_budget(strategy: MatchingStrategy, geom: EnsembleGeometry, pump: PumpBeam,
                 spec: QuadratureSpec = QuadratureSpec()) -> NoiseBudget:
    """p_spon, p_mode and the underlying ratios for one mode-matching strategy."""
    return budget_from_scales(strategy, _scales(geom, pump), spec)


def single_atom_budget(geom: EnsembleGeometry, pump: PumpBeam,
                       spec: QuadratureSpec = QuadratureSpec()) -> NoiseBudget:
    """Budget for one atom with the same position distribution (N_a = 1).

    There is a single atomic mode, so p_mode vanishes; the loss becomes
    p_spon = 1 - (1+χ) p_c/p_2.
    """
    scales = _scales(geom, pump)
    full = _ratio(scales, math.pi, spec)
    chi, _ = _chi(scales, math.pi, spec)
    return NoiseBudget(
        pc_over_p2=full.value, chi=chi, p_spon=1.0 - (1.0 + chi) * full.value, p_mode=0.0,
        cone_capture=1.0, Na_pc_over_p2=full.value, strategy=MatchingStrategy.exact(),
    )


def collective_enhancement(ensemble: NoiseBudget, single: NoiseBudget) -> float:
    """Ratio of the ensemble to single-atom efficiencies, (1 - p_spon) each."""
    return (1.0 - ensemble.p_spon) / (1.0 - single.p_spon)


# ---------------------------------------------------------------- filtering-angle search

def theta_floor(scales: DerivedScales) -> float:
    """Smallest filtering angle the search considers: a tenth of λ0/(2π r_eff)."""
    return 0.1 / math.sqrt(scales.k0_reff_sq)


def optimize_theta_d(strategy_kind, geom: EnsembleGeometry, pump: PumpBeam, p_mode_target: float,
                     spec: QuadratureSpec = QuadratureSpec(), xtol: float = 1e-4) -> float:
    """Largest θ_D whose p_mode stays at or below ``p_mode_target``.

    p_mode grows monotonically with θ_D for both filtered strategies, so a
    geometric bracket scan followed by bisection suffices.  The bracket is
    narrowed to min(xtol, 1e-3·θ) so the result is also accurate in relative
    terms for the sub-milliradian angles typical of large cells.
    """
    kind = Matching.parse(strategy_kind)
    if kind is Matching.EXACT:
        raise DomainError("optimize_theta_d needs a filtered strategy")
    if not (0.0 < p_mode_target < 1.0):
        raise DomainError("p_mode_target must lie in (0, 1)")
    scales = _scales(geom, pump)

    def p_mode(theta):
        return budget_from_scales(MatchingStrategy(kind, theta), scales, spec).p_mode

    lo = theta_floor(scales)
    if p_mode(lo) > p_mode_target:
        raise NoSolution(f"p_mode at the smallest admissible angle {lo:.3g} already exceeds the target")
    if p_mode(math.pi) <= p_mode_target:
        return math.pi
    hi = lo
    while True:
        nxt = min(hi * 1.5, math.pi)
        if p_mode(nxt) > p_mode_target:
            hi = nxt
            break
        lo = nxt
        hi = nxt
    while hi - lo > min(xtol, 1e-3 * lo):
        mid = 0.5 * (lo + hi)
        if p_mode(mid) <= p_mode_target:
            lo = mid
        else:
            hi = mid
    return lo
