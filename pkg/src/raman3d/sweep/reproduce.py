"""Canonical reproduction runs with embedded reference anchors.

Every target fixes L = 1 cm, λ0 = 0.8 µm and a broad pump; the angle plots
and tables use d_o = 1.9e3.  Anchors are the published numbers, compared
with the tolerances listed next to each target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core_model import derive_scales, geometry_from_targets, p_spon_fit
from ..errors import ReproductionMismatch
from ..noise_engine import Matching, optimize_theta_d, theta_floor
from .cache import ResultCache
from .config import BaseCell, SweepSpec
from .runner import BUDGET_COLUMNS, rows_to_csv, run_sweep

L_CM = 1.0
LAMBDA0_CM = 0.8e-4
D_O = 1.9e3

TABLE1 = {  # filtered exact matching, Fr = 1
    "theta_D": (0.0015, 0.0020, 0.0025, 0.0040, 0.0055),
    "p_mode": (0.0031, 0.0092, 0.0205, 0.0898, 0.175),
    "p_spon": (0.796, 0.666, 0.529, 0.195, 0.0502),
}
TABLE2 = {  # simple filtering, Fr = 1
    "theta_D": (0.0006, 0.0010, 0.0014, 0.0020, 0.0032),
    "p_mode": (0.0176, 0.0478, 0.0910, 0.175, 0.374),
    "p_spon": (0.964, 0.903, 0.820, 0.666, 0.351),
}
SHIFT_SLACK = 0.25
FIT_DEPTHS = (1e2, 1e3, 1.9e3, 6.4e3, 1e4)
TARGETS = ("fig5", "fig6", "fig7", "fig8", "fig9", "table1", "table2")
CSV_COLUMNS = ("series", "axis_value") + BUDGET_COLUMNS + ("quad_error_flag",)


@dataclass(frozen=True)
class AnchorCheck:
    name: str
    computed: float
    expected: float
    low: float
    high: float

    @property
    def passed(self) -> bool:
        return self.low <= self.computed <= self.high

    @property
    def rel_error(self) -> float:
        return (self.computed - self.expected) / self.expected if self.expected else math.nan

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag} {self.name}: computed {self.computed:.6g}, expected {self.expected:.6g} "
                f"(allowed [{self.low:.6g}, {self.high:.6g}], rel err {self.rel_error:+.3%})")


@dataclass
class ReproductionResult:
    target: str
    rows: list
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def csv(self) -> str:
        return rows_to_csv(self.rows, CSV_COLUMNS)

    def summary(self) -> str:
        lines = [c.line() for c in self.checks]
        ok = sum(c.passed for c in self.checks)
        lines.append(f"{self.target}: {ok}/{len(self.checks)} anchors within tolerance")
        return "\n".join(lines) + "\n"


def table_tolerance(name, computed, expected) -> AnchorCheck:
    """max(10% relative, 0.3 percentage points)."""
    tol = max(0.1 * abs(expected), 0.003)
    return AnchorCheck(name, computed, expected, expected - tol, expected + tol)


def _cell(Fr, d_o=D_O):
    return BaseCell(d_o, Fr, L_CM, LAMBDA0_CM)


def angle_grid(Fr, extra=()):
    """50 log-spaced angles over [0.1, 10]·θ_f plus any tabulated angles."""
    geom, pump = geometry_from_targets(D_O, Fr, L_CM, LAMBDA0_CM)
    scales = derive_scales(geom, pump)
    lo = max(theta_floor(scales), 0.1 * scales.theta_f)
    grid = np.geomspace(lo, 10.0 * scales.theta_f, 50)
    return tuple(sorted(set(float(v) for v in grid) | set(extra)))


def _series(label, spec, cache):
    return [{"series": label, **row} for row in run_sweep(spec, cache)]


def _table_checks(prefix, rows, table):
    by_angle = {r["axis_value"]: r for r in rows}
    checks = []
    for k, theta in enumerate(table["theta_D"]):
        row = by_angle[theta]
        for col in ("p_mode", "p_spon"):
            checks.append(table_tolerance(f"{prefix} {col} theta_D={theta:g}", row[col], table[col][k]))
    return checks


def _angle_target(target, strategy, table, angles_only, parallelism, cache):
    angles = table["theta_D"] if angles_only else angle_grid(1.0, table["theta_D"])
    spec = SweepSpec(_cell(1.0), "theta_D", angles, strategy, parallelism=parallelism)
    rows = _series("Fr=1", spec, cache)
    return ReproductionResult(target, rows, _table_checks(target, rows, table))


def _shift_target(target, strategy, p_mode_target, parallelism, cache):
    rows = []
    for Fr in (10.0, 0.1):
        spec = SweepSpec(_cell(Fr), "theta_D", angle_grid(Fr), strategy, parallelism=parallelism)
        rows += _series(f"Fr={Fr:g}", spec, cache)
    best = {}
    for Fr in (0.1, 1.0, 10.0):
        geom, pump = geometry_from_targets(D_O, Fr, L_CM, LAMBDA0_CM)
        best[Fr] = optimize_theta_d(strategy, geom, pump, p_mode_target)
    # the usable filtering angle moves by "a factor of 2-3" per decade of Fr; the quoted range is
    # widened by the same 25% used for the "about a factor of 2" optical-depth claim
    low, high = 2.0 * (1.0 - SHIFT_SLACK), 3.0 * (1.0 + SHIFT_SLACK)
    checks = [
        AnchorCheck(f"{target} theta_D shift Fr 0.1->1 at p_mode={p_mode_target:g}", best[0.1] / best[1.0],
                    2.5, low, high),
        AnchorCheck(f"{target} theta_D shift Fr 1->10 at p_mode={p_mode_target:g}", best[1.0] / best[10.0],
                    2.5, low, high),
    ]
    return ReproductionResult(target, rows, checks)


def _fig5(parallelism, cache):
    depths = tuple(sorted(set(float(v) for v in np.geomspace(1e2, 1e4, 21)) | set(FIT_DEPTHS)))
    curves = {}
    rows = []
    for Fr in (10.0, 1.0, 0.1):
        spec = SweepSpec(_cell(Fr), "d_o", depths, Matching.EXACT, parallelism=parallelism)
        series = _series(f"Fr={Fr:g}", spec, cache)
        rows += series
        curves[Fr] = {r["axis_value"]: r["p_spon"] for r in series}
    checks = []
    for Fr in (1.0, 10.0):
        for d in FIT_DEPTHS:
            fit = p_spon_fit(d)
            checks.append(AnchorCheck(f"fig5 p_spon fit Fr={Fr:g} d_o={d:g}", curves[Fr][d], fit, 0.8 * fit, 1.2 * fit))
    checks.append(AnchorCheck("fig5 p_spon Fr=1 d_o=6400", curves[1.0][6.4e3], 0.004, 0.003, 0.005))
    for d in depths:
        ratio = curves[10.0][d] / curves[1.0][d]
        checks.append(AnchorCheck(f"fig5 overlap Fr=10/Fr=1 d_o={d:.6g}", ratio, 1.0, 0.95, 1.05))
    for d in FIT_DEPTHS:
        ratio = curves[0.1][d] / curves[1.0][d]
        checks.append(AnchorCheck(f"fig5 factor Fr=0.1/Fr=1 d_o={d:g}", ratio, 2.0, 1.5, 2.5))
    return ReproductionResult("fig5", rows, checks)


def reproduce(target: str, parallelism: int = 1, cache: ResultCache | None = None,
              strict: bool = True) -> ReproductionResult:
    """Run a canonical target; with ``strict`` a failed anchor raises ReproductionMismatch.

    The exception carries the full result on ``.result`` so the data can still be written.
    """
    if target == "fig5":
        result = _fig5(parallelism, cache)
    elif target == "fig6":
        result = _angle_target("fig6", Matching.FILTERED_EXACT, TABLE1, False, parallelism, cache)
    elif target == "fig7":
        result = _shift_target("fig7", Matching.FILTERED_EXACT, 0.01, parallelism, cache)
    elif target == "fig8":
        result = _angle_target("fig8", Matching.SIMPLE_FILTER, TABLE2, False, parallelism, cache)
    elif target == "fig9":
        result = _shift_target("fig9", Matching.SIMPLE_FILTER, 0.05, parallelism, cache)
    elif target == "table1":
        result = _angle_target("table1", Matching.FILTERED_EXACT, TABLE1, True, parallelism, cache)
    elif target == "table2":
        result = _angle_target("table2", Matching.SIMPLE_FILTER, TABLE2, True, parallelism, cache)
    else:
        raise ValueError(f"unknown reproduction target {target!r}; choose from {TARGETS}")
    if strict and not result.passed:
        bad = [c for c in result.checks if not c.passed]
        exc = ReproductionMismatch(f"{target}: {len(bad)} anchor(s) outside tolerance", bad)
        exc.result = result
        raise exc
    return result
