"""JSON sweep configuration.

A configuration document looks like::

    {
      "units": {"length": "cm", "density": "cm^-3", "angle": "rad"},
      "base": {"d_o": 1900, "Fr": 1, "L": 1, "lambda0": 8e-5, "r0_over_R0": "infinite"},
      "axis": "theta_D",
      "values": [0.0015, 0.002, 0.0025],
      "strategy": "filtered_exact",
      "theta_D": null,
      "quadrature": {"rel_tol": 1e-8, "abs_tol": 1e-12},
      "parallelism": 1,
      "protocol": {"fidelity_imperfection_target": 0.01}
    }

``base`` may instead give the physical form ``length_L``, ``radius_R0``,
``density_na``, ``wavelength_lambda0`` and ``radius_r0``; it is converted to
the target form (d_o, Fr, L, λ0, r0/R0) so that every axis can override one
entry.  ``protocol`` is optional and adds protocol columns to the output.
Lengths are converted to cm, densities to cm^-3 and angles to rad.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from ..core_model import INFINITE, EnsembleGeometry, PumpBeam, derive_scales
from ..errors import ConfigError, DomainError
from ..noise_engine import Matching
from ..protocol import ProtocolParams
from ..quadrature import QuadratureSpec

AXES = ("d_o", "theta_D", "Fr")

_LENGTH = {"m": 100.0, "cm": 1.0, "mm": 0.1, "um": 1e-4, "µm": 1e-4, "nm": 1e-7}
_DENSITY = {"cm^-3": 1.0, "m^-3": 1e-6}
_ANGLE = {"rad": 1.0, "mrad": 1e-3}

_TARGET_KEYS = {"d_o", "Fr", "L", "lambda0", "r0_over_R0"}
_PHYSICAL_KEYS = {"length_L", "radius_R0", "density_na", "wavelength_lambda0", "radius_r0"}


@dataclass(frozen=True)
class BaseCell:
    """Target-form description of the cell: optical depth, Fresnel number, length, wavelength."""

    d_o: float
    Fr: float
    L: float
    lambda0: float
    r0_over_R0: float = INFINITE

    def with_axis(self, axis: str, value: float) -> "BaseCell":
        if axis in ("d_o", "Fr"):
            return replace(self, **{axis: float(value)})
        return self

    def canonical(self) -> dict:
        return {
            "d_o": self.d_o,
            "Fr": self.Fr,
            "L": self.L,
            "lambda0": self.lambda0,
            "r0_over_R0": "infinite" if math.isinf(self.r0_over_R0) else self.r0_over_R0,
        }


@dataclass(frozen=True)
class SweepSpec:
    base: BaseCell
    axis: str
    values: tuple
    strategy: Matching = Matching.EXACT
    theta_D: float | None = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    parallelism: int = 1
    protocol: ProtocolParams | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}, got {self.axis!r}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ConfigError("values must be non-empty")
        steps = [b - a for a, b in zip(vals, vals[1:])]
        if steps and not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
            raise ConfigError("values must be strictly monotone")
        object.__setattr__(self, "values", vals)
        try:
            object.__setattr__(self, "strategy", Matching.parse(self.strategy))
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if self.parallelism < 1:
            raise ConfigError("parallelism must be positive")
        filtered = self.strategy is not Matching.EXACT
        if self.axis == "theta_D" and not filtered:
            raise ConfigError("a theta_D axis needs a filtered strategy")
        if filtered and self.axis != "theta_D" and self.theta_D is None:
            raise ConfigError(f"{self.strategy.value} needs theta_D when the axis is {self.axis}")


def _unit(table, key, name):
    if key not in table:
        raise ConfigError(f"unknown {name} unit {key!r}; expected one of {sorted(table)}")
    return table[key]


def _radius(value, length_scale):
    if isinstance(value, str):
        if value.strip().lower() in {"inf", "infinite", "infinity"}:
            return INFINITE
        raise ConfigError(f"unrecognised pump radius {value!r}")
    return float(value) * length_scale


def _base_from_doc(doc: dict, units: dict) -> BaseCell:
    length = _unit(_LENGTH, units.get("length", "cm"), "length")
    density = _unit(_DENSITY, units.get("density", "cm^-3"), "density")
    keys = set(doc)
    try:
        if keys <= _TARGET_KEYS and {"d_o", "Fr", "L", "lambda0"} <= keys:
            ratio = doc.get("r0_over_R0", "infinite")
            if isinstance(ratio, str):
                ratio = _radius(ratio, 1.0)
            return BaseCell(float(doc["d_o"]), float(doc["Fr"]), float(doc["L"]) * length,
                            float(doc["lambda0"]) * length, float(ratio))
        if keys <= _PHYSICAL_KEYS and {"length_L", "radius_R0", "density_na", "wavelength_lambda0"} <= keys:
            geom = EnsembleGeometry(float(doc["length_L"]) * length, float(doc["radius_R0"]) * length,
                                    float(doc["density_na"]) * density)
            pump = PumpBeam(float(doc["wavelength_lambda0"]) * length,
                            _radius(doc.get("radius_r0", "infinite"), length))
            scales = derive_scales(geom, pump)
            return BaseCell(scales.d_o, scales.Fr, geom.length_L, pump.wavelength_lambda0,
                            pump.radius_r0 / geom.radius_R0)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid base cell: {exc}") from None
    raise ConfigError("base must give either {d_o, Fr, L, lambda0[, r0_over_R0]} or "
                      "{length_L, radius_R0, density_na, wavelength_lambda0[, radius_r0]}")


def spec_from_dict(doc: dict, overrides: dict | None = None) -> SweepSpec:
    """Build a :class:`SweepSpec`; ``overrides`` holds CLI flags that win over the document."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    doc = dict(doc)
    for key, value in (overrides or {}).items():
        if value is not None:
            doc[key] = value
    units = doc.get("units", {})
    if not isinstance(units, dict):
        raise ConfigError("units must be an object")
    for key in ("base", "axis", "values"):
        if key not in doc:
            raise ConfigError(f"missing required key {key!r}")
    angle = _unit(_ANGLE, units.get("angle", "rad"), "angle")
    axis = doc["axis"]
    values = doc["values"]
    if not isinstance(values, list):
        raise ConfigError("values must be a list")
    try:
        values = [float(v) * (angle if axis == "theta_D" else 1.0) for v in values]
        theta = doc.get("theta_D")
        theta = None if theta is None else float(theta) * angle
        quad = QuadratureSpec(**doc.get("quadrature", {}))
        protocol = ProtocolParams(**doc["protocol"]) if doc.get("protocol") is not None else None
        parallelism = int(doc.get("parallelism", 1))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return SweepSpec(
        base=_base_from_doc(doc["base"], units),
        axis=axis,
        values=tuple(values),
        strategy=doc.get("strategy", "exact"),
        theta_D=theta,
        quadrature=quad,
        parallelism=parallelism,
        protocol=protocol,
    )


def load_config(path, overrides: dict | None = None) -> SweepSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return spec_from_dict(doc, overrides)
