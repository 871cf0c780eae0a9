"""Parameter sweeps: one noise budget per axis value, cached and optionally parallel."""

from __future__ import annotations

import io
import math
from concurrent.futures import ProcessPoolExecutor

from .. import __version__
from ..core_model import geometry_from_targets
from ..errors import ConvergenceError, NumericalInstability
from ..noise_engine import Matching, MatchingStrategy, noise_budget
from ..protocol import ProtocolParams, success_metrics
from ..quadrature import QuadratureSpec
from .cache import ResultCache

BUDGET_COLUMNS = ("p_spon", "p_mode", "chi", "pc_over_p2", "cone_capture")
PROTOCOL_COLUMNS = ("required_pc", "p_click_per_round", "expected_rounds", "c0", "state_fidelity")


def point_inputs(spec, value) -> dict:
    """Canonical inputs of one sweep point (also the cache key)."""
    cell = spec.base.with_axis(spec.axis, value)
    theta = value if spec.axis == "theta_D" else spec.theta_D
    if spec.strategy is Matching.EXACT:
        theta = None
    q = spec.quadrature
    inputs = {
        "cell": cell.canonical(),
        "strategy": spec.strategy.value,
        "theta_D": theta,
        "quadrature": {"rel_tol": q.rel_tol, "abs_tol": q.abs_tol, "max_subdivisions": q.max_subdivisions,
                       "initial_panels": q.initial_panels},
        "tool_version": __version__,
    }
    if spec.protocol is not None:
        p = spec.protocol
        inputs["protocol"] = {"fidelity_imperfection_target": p.fidelity_imperfection_target,
                              "phase_phi": p.phase_phi, "c0_extra": p.c0_extra}
    return inputs


def evaluate_point(inputs: dict) -> dict:
    """Compute one row's outputs; quadrature trouble is flagged, never raised."""
    cell = inputs["cell"]
    geom, pump = geometry_from_targets(cell["d_o"], cell["Fr"], cell["L"], cell["lambda0"], cell["r0_over_R0"])
    q = QuadratureSpec(**inputs["quadrature"])
    strategy = MatchingStrategy(inputs["strategy"], inputs["theta_D"])
    columns = BUDGET_COLUMNS + (PROTOCOL_COLUMNS if "protocol" in inputs else ())
    try:
        budget = noise_budget(strategy, geom, pump, q)
    except (ConvergenceError, NumericalInstability):
        out = {c: math.nan for c in columns}
        out["quad_error_flag"] = 1
        return out
    out = {c: float(getattr(budget, c)) for c in BUDGET_COLUMNS}
    if "protocol" in inputs:
        metrics = success_metrics(ProtocolParams(**inputs["protocol"]), budget)
        out.update({c: float(getattr(metrics, c)) for c in PROTOCOL_COLUMNS})
    out["quad_error_flag"] = 0
    return out


def run_points(inputs_list, parallelism=1, cache: ResultCache | None = None):
    """Outputs for each inputs dict, in the given order; cache hits skip evaluation."""
    results = [cache.get(i) if cache is not None else None for i in inputs_list]
    todo = [k for k, r in enumerate(results) if r is None]
    if todo:
        pending = [inputs_list[k] for k in todo]
        if parallelism > 1 and len(pending) > 1:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                fresh = list(pool.map(evaluate_point, pending))
        else:
            fresh = [evaluate_point(i) for i in pending]
        for k, out in zip(todo, fresh):
            results[k] = out
            if cache is not None and out["quad_error_flag"] == 0:
                cache.put(inputs_list[k], out, __version__)
    return results


def run_sweep(spec, cache: ResultCache | None = None):
    """One row per axis value, in axis order: dicts with axis_value and the output columns."""
    inputs = [point_inputs(spec, v) for v in spec.values]
    outputs = run_points(inputs, spec.parallelism, cache)
    return [{"axis_value": v, **out} for v, out in zip(spec.values, outputs)]


def format_number(x) -> str:
    if isinstance(x, int):
        return str(x)
    return f"{x:.11e}"


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(row[c] if isinstance(row[c], str) else format_number(row[c]) for c in columns) + "\n")
    return buf.getvalue()


def sweep_columns(spec) -> tuple:
    extra = PROTOCOL_COLUMNS if spec.protocol is not None else ()
    return ("axis_value",) + BUDGET_COLUMNS + ("quad_error_flag",) + extra
