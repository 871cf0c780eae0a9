"""Physical parameters of the cell and pump, and the dimensionless groups derived from them.

All lengths are in centimetres and densities in cm^-3.  Downstream modules
only ever consume :class:`DerivedScales`, which makes every result a
function of (k0 L, k0 R0, k0 r0, d_o) alone.

A pump radius of ``math.inf`` (or the string ``"infinite"``) is a
first-class value meaning the broad-beam limit r0 >> R0; every formula that
depends on r0 is written in terms of ``(R0/r0)**2`` so the limit is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

#: Smallest k0*L for which the large-k0L approximations are accepted.
MIN_K0L = 100.0

INFINITE = math.inf


def _as_radius(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in {"inf", "infinite", "infinity"}:
            return INFINITE
        raise DomainError(f"unrecognised pump radius {value!r}")
    return float(value)


def _require_positive(name: str, value: float) -> None:
    if not (value > 0.0) or math.isnan(value):
        raise DomainError(f"{name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class EnsembleGeometry:
    """Cell of length L, Gaussian transverse radius R0 and mean density n_a."""

    length_L: float
    radius_R0: float
    density_na: float

    def __post_init__(self):
        for name in ("length_L", "radius_R0", "density_na"):
            value = float(getattr(self, name))
            _require_positive(name, value)
            if math.isinf(value):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class PumpBeam:
    """Pump wavelength and Gaussian transverse radius (may be infinite)."""

    wavelength_lambda0: float
    radius_r0: float = INFINITE

    def __post_init__(self):
        lam = float(self.wavelength_lambda0)
        _require_positive("wavelength_lambda0", lam)
        if math.isinf(lam):
            raise DomainError("wavelength_lambda0 must be finite")
        r0 = _as_radius(self.radius_r0)
        _require_positive("radius_r0", r0)
        object.__setattr__(self, "wavelength_lambda0", lam)
        object.__setattr__(self, "radius_r0", r0)

    @property
    def is_broad(self) -> bool:
        """True in the r0 -> infinity limit."""
        return math.isinf(self.radius_r0)


@dataclass(frozen=True)
class DerivedScales:
    k0: float
    d_o: float
    Fr: float
    N_a: float
    r_eff: float
    theta_f: float
    k0L: float
    k0R0: float
    k0r0: float

    @property
    def is_broad(self) -> bool:
        return math.isinf(self.k0r0)

    @property
    def inv_rho2(self) -> float:
        """(R0/r0)**2, exactly zero for an infinite pump radius."""
        if self.is_broad:
            return 0.0
        return (self.k0R0 / self.k0r0) ** 2

    @property
    def k0_reff_sq(self) -> float:
        """(k0 r_eff)**2 = (k0R0)**2 * r0**2/(r0**2 + R0**2)."""
        return self.k0R0**2 / (1.0 + self.inv_rho2)

    @property
    def k0_sigma_sq(self) -> float:
        """(k0 sigma)**2 with sigma**2 = r0**2 R0**2/(r0**2 + 2 R0**2)."""
        return self.k0R0**2 / (1.0 + 2.0 * self.inv_rho2)

    @property
    def mean_intensity(self) -> float:
        """Ensemble average of |u_perp|**2, r0**2/(r0**2 + 2 R0**2)."""
        return 1.0 / (1.0 + 2.0 * self.inv_rho2)

    @property
    def amplitude_prefactor(self) -> float:
        """Forward amplitude of the signal mode, r0**2/(r0**2 + R0**2)."""
        return 1.0 / (1.0 + self.inv_rho2)


def derive_scales(geom: EnsembleGeometry, pump: PumpBeam) -> DerivedScales:
    """Compute every dimensionless group for a cell/pump pair.

    Raises
    ------
    DomainError
        If k0*L < MIN_K0L, where the forward-cone approximations break down.
    """
    lam = pump.wavelength_lambda0
    L, R0, na = geom.length_L, geom.radius_R0, geom.density_na
    k0 = 2.0 * math.pi / lam
    k0L = k0 * L
    if k0L < MIN_K0L:
        raise DomainError(f"k0*L = {k0L:.4g} is below the validity threshold {MIN_K0L:g}")

    r0 = pump.radius_r0
    if math.isinf(r0):
        r_eff = R0
    else:
        r_eff = r0 * R0 / math.hypot(r0, R0)
    k0r_eff = k0 * r_eff
    return DerivedScales(
        k0=k0,
        d_o=na * lam * lam * L,
        Fr=math.pi * r_eff * r_eff / (lam * L),
        N_a=na * math.pi * R0 * R0 * L,
        r_eff=r_eff,
        theta_f=min(1.0 / math.sqrt(k0L), 1.0 / k0r_eff),
        k0L=k0L,
        k0R0=k0 * R0,
        k0r0=k0 * r0,
    )


def geometry_from_targets(d_o, Fr, L, lambda0, r0_over_R0=INFINITE):
    """Build a cell and pump that realise a requested optical depth and Fresnel number.

    Returns
    -------
    (EnsembleGeometry, PumpBeam)
    """
    ratio = _as_radius(r0_over_R0)
    for name, value in (("d_o", d_o), ("Fr", Fr), ("L", L), ("lambda0", lambda0), ("r0_over_R0", ratio)):
        _require_positive(name, float(value))
    reff_sq = Fr * lambda0 * L / math.pi
    if math.isinf(ratio):
        R0 = math.sqrt(reff_sq)
        r0 = INFINITE
    else:
        # r_eff**2 = R0**2 * rho**2 / (1 + rho**2)
        R0 = math.sqrt(reff_sq * (1.0 + 1.0 / (ratio * ratio)))
        r0 = ratio * R0
    na = d_o / (lambda0 * lambda0 * L)
    return EnsembleGeometry(L, R0, na), PumpBeam(lambda0, r0)


def estimate_Na_pc_over_p2(scales: DerivedScales) -> float:
    """Order-of-magnitude estimate of N_a p_c/p_2 from the forward-cone solid angle.

    min(n_a lambda0 r_eff**2 / 2, n_a lambda0**2 L / (4 pi)), written through
    d_o and Fr so that it needs nothing beyond the derived scales.
    """
    return min(scales.d_o * scales.Fr / (2.0 * math.pi), scales.d_o / (4.0 * math.pi))


def p_spon_fit(d_o: float) -> float:
    """Empirical law p_spon = 1/(1 + d_o/26).

    Valid for exact mode matching with Fresnel numbers between 1 and 10.
    """
    if d_o < 0:
        raise DomainError("optical depth must be non-negative")
    return 1.0 / (1.0 + d_o / 26.0)
