"""Acceptance criteria, one test each.

Every test appends a ``CRITERION n: PASS|FAIL ...`` line that pytest prints in
an "acceptance criteria" section at the end of the run.  The file can also be
run directly (``python3 tests/test_acceptance.py``) to print only those lines.
"""

import math
import sys
import time

import numpy as np
import pytest

from raman3d.core_model import EnsembleGeometry, PumpBeam, derive_scales, geometry_from_targets, p_spon_fit
from raman3d.noise_engine import (Matching, MatchingStrategy, collective_enhancement, noise_budget,
                                  single_atom_budget, theta_floor)
from raman3d.protocol import mixed_state_fidelity, repetition_factor
from raman3d.quadrature import QuadratureSpec
from raman3d.sweep.oracle import OracleSpec, run_oracle
from raman3d.sweep.reproduce import TABLE1, TABLE2, reproduce, table_tolerance

try:
    from .conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

pytestmark = pytest.mark.acceptance

LAMBDA0 = 0.8e-4
D_O = 1.9e3


def record(n, passed, detail, seconds):
    line = f"CRITERION {n}: {'PASS' if passed else 'FAIL'} ({seconds:.1f} s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def _table_misses(kind, table, d_o):
    geom, pump = geometry_from_targets(d_o, 1.0, 1.0, LAMBDA0)
    misses = []
    worst = 0.0
    for k, theta in enumerate(table["theta_D"]):
        b = noise_budget(MatchingStrategy(kind, theta), geom, pump)
        for col in ("p_mode", "p_spon"):
            chk = table_tolerance(f"{col} theta_D={theta:g}", getattr(b, col), table[col][k])
            # distance in units of the allowed half-width
            worst = max(worst, abs(chk.computed - chk.expected) / (chk.high - chk.expected))
            if not chk.passed:
                misses.append(chk)
    return misses, worst


def _table_criterion(n, target, kind, table, budget_s):
    t0 = time.perf_counter()
    result = reproduce(target, strict=False)
    bad = [c for c in result.checks if not c.passed]
    detail = f"{target}: {len(result.checks) - len(bad)}/{len(result.checks)} entries within tolerance"
    if bad:
        # the prescribed fallback: scan the optical depth over [1.7, 2.1]e3
        scan = {d: _table_misses(kind, table, d) for d in np.linspace(1.7e3, 2.1e3, 9)}
        best = min(scan, key=lambda d: (len(scan[d][0]), scan[d][1]))
        detail += (f"; d_o scan [1.7e3, 2.1e3]: best d_o={best:.4g} still misses {len(scan[best][0])} entries, "
                   f"worst residual {scan[best][1]:.2f}x tolerance; first miss: {bad[0].line()}")
    elapsed = time.perf_counter() - t0
    return record(n, not bad and elapsed < budget_s, detail, elapsed)


def criterion_1():
    return _table_criterion(1, "table1", Matching.FILTERED_EXACT, TABLE1, 60.0)


def criterion_2():
    return _table_criterion(2, "table2", Matching.SIMPLE_FILTER, TABLE2, 30.0)


def criterion_3():
    t0 = time.perf_counter()
    parts, ok = [], True
    for Fr, expected in ((1.0, 0.24), (10.0, 0.25), (0.1, 0.23)):
        pm = [noise_budget(MatchingStrategy.exact(), *geometry_from_targets(D_O, Fr, L, LAMBDA0)).p_mode
              for L in (0.3, 1.0, 3.0)]
        anchor = abs(pm[1] - expected) <= 0.015
        spread = max(pm) - min(pm)
        ok &= anchor and spread < 0.005
        parts.append(f"Fr={Fr:g} p_mode={pm[1]:.4f} (expected {expected:.2f}), L spread {spread:.1e}")
    elapsed = time.perf_counter() - t0
    return record(3, ok and elapsed < 120, "; ".join(parts), elapsed)


def criterion_4():
    t0 = time.perf_counter()
    depths = (1e2, 1e3, 1.9e3, 6.4e3, 1e4)
    curves = {Fr: {d: noise_budget(MatchingStrategy.exact(), *geometry_from_targets(d, Fr, 1.0, LAMBDA0)).p_spon
                   for d in depths} for Fr in (0.1, 1.0, 10.0)}
    fit_err = max(abs(curves[Fr][d] / p_spon_fit(d) - 1) for Fr in (1.0, 10.0) for d in depths)
    at_64 = curves[1.0][6.4e3]
    factors = [curves[0.1][d] / curves[1.0][d] for d in depths]
    ok = fit_err <= 0.2 and 0.003 <= at_64 <= 0.005 and all(1.5 <= f <= 2.5 for f in factors)
    elapsed = time.perf_counter() - t0
    detail = (f"max fit deviation {fit_err:.1%}; p_spon(6.4e3)={at_64:.4f}; "
              f"Fr=0.1/Fr=1 factors {min(factors):.2f}..{max(factors):.2f}")
    return record(4, ok and elapsed < 120, detail, elapsed)


def criterion_5():
    t0 = time.perf_counter()
    report = run_oracle(OracleSpec())
    parts = [f"{name} {s['within_2sigma']}/{s['seeds']} max|z|={s['max_abs_z']:.2f}"
             for name, s in report["summary"].items()]
    elapsed = time.perf_counter() - t0
    return record(5, report["passed"] and elapsed < 600, "; ".join(parts), elapsed)


def _rescaled(geom, pump, c):
    return (EnsembleGeometry(geom.length_L * c, geom.radius_R0 * c, geom.density_na / c**3),
            PumpBeam(pump.wavelength_lambda0 * c, pump.radius_r0 * c))


def criterion_6():
    t0 = time.perf_counter()
    failures = []
    # monotonicity over 20 log-spaced angles spanning the whole admissible range
    for Fr in (0.1, 1.0, 10.0):
        cell = geometry_from_targets(D_O, Fr, 1.0, LAMBDA0)
        s = derive_scales(*cell)
        grid = np.geomspace(theta_floor(s), math.pi, 20)
        fe = [noise_budget(MatchingStrategy.filtered_exact(t), *cell) for t in grid]
        sf = [noise_budget(MatchingStrategy.simple_filter(t), *cell) for t in grid]
        for label, rows in (("filtered_exact", fe), ("simple_filter", sf)):
            pm = np.array([b.p_mode for b in rows])
            ps = np.array([b.p_spon for b in rows])
            # round-off allowance at the quadrature tolerance
            slack = 2 * QuadratureSpec().rel_tol * np.maximum(pm[:-1], pm[1:])
            drop = np.diff(pm) + slack
            if drop.min() < 0:
                k = int(np.argmin(drop))
                failures.append(f"{label} Fr={Fr:g} p_mode falls {pm[k] - pm[k + 1]:.2e} "
                                f"between theta_D={grid[k]:.3g} and {grid[k + 1]:.3g}")
            if np.diff(ps).max() > 0:
                failures.append(f"{label} Fr={Fr:g} p_spon rises")
        if any(b.p_mode < a.p_mode for a, b in zip(fe, sf)):
            failures.append(f"simple_filter below filtered_exact at Fr={Fr:g}")
        ex = noise_budget(MatchingStrategy.exact(), *cell)
        pi = noise_budget(MatchingStrategy.filtered_exact(math.pi), *cell)
        tol = 2 * QuadratureSpec().rel_tol
        if abs(pi.p_mode - ex.p_mode) > tol * ex.p_mode or abs(pi.p_spon - ex.p_spon) > tol * ex.p_spon:
            failures.append(f"filtered_exact(pi) != exact at Fr={Fr:g}")
    # scale invariance
    cell = geometry_from_targets(D_O, 1.0, 1.0, LAMBDA0)
    for strategy in (MatchingStrategy.exact(), MatchingStrategy.filtered_exact(0.002),
                     MatchingStrategy.simple_filter(0.001)):
        ref = noise_budget(strategy, *cell)
        for c in (1e-2, 10.0):
            got = noise_budget(strategy, *_rescaled(*cell, c))
            if any(abs(getattr(got, f) - getattr(ref, f)) > 1e-6 * abs(getattr(ref, f))
                   for f in ("p_mode", "p_spon", "chi", "pc_over_p2")):
                failures.append(f"{strategy.label} not invariant under rescaling by {c:g}")
    # single atom and enhancement at the small instance
    geom, pump = OracleSpec().cell()
    single = single_atom_budget(geom, pump)
    enh = collective_enhancement(noise_budget(MatchingStrategy.exact(), geom, pump), single)
    n_a = derive_scales(geom, pump).N_a
    if single.p_mode != 0.0:
        failures.append("single-atom p_mode is nonzero")
    if not (0.3 * n_a <= enh <= 3 * n_a):
        failures.append(f"enhancement {enh:.3g} outside [0.3, 3] N_a")
    elapsed = time.perf_counter() - t0
    detail = f"enhancement {enh / n_a:.2f} N_a; " + ("all properties hold" if not failures else "; ".join(failures))
    return record(6, not failures and elapsed < 300, detail, elapsed)


def criterion_7():
    t0 = time.perf_counter()
    cell = geometry_from_targets(D_O, 1.0, 1.0, LAMBDA0)
    f1 = repetition_factor(noise_budget(MatchingStrategy.filtered_exact(0.002), *cell).p_spon)
    f2 = repetition_factor(noise_budget(MatchingStrategy.simple_filter(0.001), *cell).p_spon)
    phis = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    props = (mixed_state_fidelity(0.0) == 1.0 and mixed_state_fidelity(1.0) == 0.5
             and all(abs(mixed_state_fidelity(0.3, p) - 1 / 1.3) <= 1e-15 for p in phis))
    ok = abs(f1 - 3.0) <= 0.3 and abs(f2 - 10.0) <= 1.0 and props
    elapsed = time.perf_counter() - t0
    detail = (f"repetition factor {f1:.3g} at filtered_exact 0.0020 (expected 3.0 +- 0.3), "
              f"{f2:.3g} at simple_filter 0.0010 (expected 10 +- 1); fidelity properties "
              f"{'hold' if props else 'violated'}")
    return record(7, ok and elapsed < 1.0, detail, elapsed)


def criterion_8():
    t0 = time.perf_counter()
    one = reproduce("table1", parallelism=1, strict=False).csv().encode()
    eight = reproduce("table1", parallelism=8, strict=False).csv().encode()
    elapsed = time.perf_counter() - t0
    return record(8, one == eight, f"table1 CSV {len(one)} bytes, identical={one == eight}", elapsed)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{k + 1}" for k in range(len(CRITERIA))])
def test_acceptance(criterion):
    assert criterion(), ACCEPTANCE_LINES[-1]


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
