"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case runs the same arguments through both backends, reports the best
wall time of ``--repeat`` runs and checks that the two results agree.
"""

import argparse
import math
import timeit

import numpy as np

from raman3d import _backend
from raman3d.quadrature import graded_breakpoints


def cases():
    # table cell: Fr = 1, L = 1 cm, λ0 = 0.8 µm
    k0L = 2 * math.pi / 0.8e-4
    gauss = k0L  # (k0 R0)²/2 with (k0 R0)² = 2 k0L
    quarter = 0.5 * k0L  # (k0 R0)²/4 for the broad pump, used for both csig and cb
    scale = 1 / math.sqrt(2 * k0L)
    cone_edges = graded_breakpoints(0.0, math.pi / scale, 64, 1.0)
    chi_edges = graded_breakpoints(0.0, 0.002 / scale, 32, 1.0)

    rng = np.random.default_rng(0)
    n = 200_000
    x, y = rng.normal(0, 0.004, (2, n))
    z = rng.uniform(-0.5, 0.5, n)
    u = np.ones(n)
    k0 = 2 * math.pi / 0.8e-4
    thetas = np.linspace(0.0, 0.02, 64)
    coef = np.exp(-thetas / 0.005)
    return {
        "cone_integral": ("cone_integral", (k0L, gauss, scale, cone_edges, 1e-14, 1e-10, 10**5)),
        "chi_double": ("chi_double", (k0L, quarter, quarter, scale, chi_edges, 1e-10, 1e-11, 1e-8, 10**5)),
        "mode_sums 200k x 64": ("mode_sums", (x, y, z, u, k0, thetas, 0.3)),
        "chi_sums 200k x 64": ("chi_sums", (x, y, z, u, k0, thetas, coef)),
    }


def first_value(result):
    return np.asarray(result[0], dtype=float)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    backends = _backend.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the fallback is available")
    names = sorted(backends)
    print(f"{'kernel':<22}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}  agree")
    for label, (fn, kw) in cases().items():
        times, values = {}, {}
        for name in names:
            f = getattr(backends[name], fn)
            values[name] = first_value(f(*kw))
            times[name] = min(timeit.repeat(lambda: f(*kw), number=1, repeat=args.repeat))
        speed = times["python"] / times["cython"] if "cython" in times else math.nan
        agree = all(np.allclose(values[n], values["python"], rtol=1e-8) for n in names)
        print(f"{label:<22}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names) + f"{speed:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
