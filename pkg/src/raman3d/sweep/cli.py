"""Command-line front end.

Exit codes: 0 success, 2 reproduction or oracle mismatch, 3 quadrature
failure in a sweep point, 4 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from ..errors import ConfigError, DomainError, ReproductionMismatch
from .cache import ResultCache
from .config import load_config
from .oracle import OracleSpec, run_oracle
from .reproduce import TARGETS, reproduce
from .runner import rows_to_csv, run_sweep, sweep_columns

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_QUADRATURE = 3
EXIT_CONFIG = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which would read as a mismatch
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="raman3d", description="Noise budgets for Raman scattering in atomic ensembles.")
    p.add_argument("--config", help="JSON sweep configuration")
    p.add_argument("--out", help="output file (CSV for sweeps, JSON for --oracle); stdout if omitted")
    p.add_argument("--cache-dir", help="directory of cached point results")
    p.add_argument("--parallelism", type=int, help="worker processes for sweep points")
    p.add_argument("--strategy", choices=("exact", "filtered_exact", "simple_filter"))
    p.add_argument("--theta-d", type=float, dest="theta_d", help="filtering angle [rad] for d_o or Fr sweeps")
    p.add_argument("--reproduce", choices=TARGETS, help="run a canonical figure or table")
    p.add_argument("--oracle", action="store_true", help="Monte-Carlo cross-check on the small instance")
    p.add_argument("--seed", type=int, help="first seed for --oracle")
    return p


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _oracle(args):
    spec = OracleSpec()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                doc = json.load(fh).get("oracle", {})
            spec = OracleSpec(**doc)
        except (OSError, ValueError, TypeError) as exc:
            raise ConfigError(f"invalid oracle configuration: {exc}") from None
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    report = run_oracle(spec)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    for name, s in report["summary"].items():
        tag = "PASS" if s["passed"] else "FAIL"
        print(f"{tag} {name}: {s['within_2sigma']}/{s['seeds']} within 2 sigma, max |z| = {s['max_abs_z']:.2f}",
              file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_MISMATCH


def _reproduce(args, cache):
    try:
        result = reproduce(args.reproduce, args.parallelism or 1, cache)
        code = EXIT_OK
    except ReproductionMismatch as exc:
        result = exc.result
        code = EXIT_MISMATCH
    _emit(result.csv(), args.out)
    sys.stderr.write(result.summary())
    if any(r["quad_error_flag"] for r in result.rows) and code == EXIT_OK:
        code = EXIT_QUADRATURE
    return code


def _sweep(args, cache):
    overrides = {"strategy": args.strategy, "theta_D": args.theta_d, "parallelism": args.parallelism}
    spec = load_config(args.config, overrides)
    rows = run_sweep(spec, cache)
    _emit(rows_to_csv(rows, sweep_columns(spec)), args.out)
    return EXIT_QUADRATURE if any(r["quad_error_flag"] for r in rows) else EXIT_OK


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.parallelism is not None and args.parallelism < 1:
            raise ConfigError("--parallelism must be positive")
        if args.oracle:
            return _oracle(args)
        cache = ResultCache(args.cache_dir) if args.cache_dir else None
        if args.reproduce:
            return _reproduce(args, cache)
        if not args.config:
            raise ConfigError("one of --config, --reproduce or --oracle is required")
        return _sweep(args, cache)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
