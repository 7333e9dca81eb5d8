"""Time the numba and pure-numpy kernel backends on identical inputs.

    python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]

Each kernel is warmed up once (so numba compilation is excluded), then timed
with ``timeit``; the table reports the best of ``--repeat`` runs per backend.
An end-to-end Monte Carlo estimate is also timed in a subprocess per backend,
since the environment flag is read at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from orthantvar import kernels
from orthantvar.kernels import CLAYTON, FRANK, GUMBEL

END_TO_END = (
    "import time; from orthantvar import CopulaModel, Portfolio, lower_var_monte_carlo;"
    "p = Portfolio(CopulaModel('gumbel', 2, 2.0));"
    "lower_var_monte_carlo(p, 0.5, n=10000, seed=0);"
    "t = time.perf_counter(); lower_var_monte_carlo(p, 0.5, n={n}, seed=1);"
    "print(time.perf_counter() - t)"
)


def workloads(n, rng):
    t = rng.random(n)
    s = rng.exponential(2.0, n)
    u = rng.random((n // 2, 2))
    e = rng.standard_exponential((n // 2, 2))
    r = rng.exponential(2.0, n // 2)
    x = rng.random((n, 2))
    score = rng.random(n)
    ref = np.zeros(2)
    lo = np.full(4, 0.5)
    hi = 0.5 + 0.005 * 2.0 ** np.arange(4)
    return {
        "generator (frank)": lambda impl: impl.generator(FRANK, 3.0, t),
        "generator_inverse (gumbel)": lambda impl: impl.generator_inverse(GUMBEL, 2.0, s),
        "archimedean_cdf (clayton)": lambda impl: impl.archimedean_cdf(CLAYTON, 2.0, u),
        "radial_transform (clayton)": lambda impl: impl.radial_transform(CLAYTON, 2.0, e, r),
        "band_stats (4 bands)": lambda impl: impl.band_stats(x, score, ref, lo, hi, False),
    }


def end_to_end(flag, n):
    env = dict(os.environ, **{kernels.ENV_FLAG: flag})
    out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env, capture_output=True,
                         text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1_000_000, help="array length per kernel call")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = {"numba": kernels.backend("numba"), "numpy": kernels.backend("numpy")}
    rng = np.random.default_rng(0)
    print(f"n={args.n:,}  best of {args.repeat}  (seconds)")
    print(f"{'kernel':<30}{'numba':>10}{'numpy':>10}{'speedup':>10}")
    for name, call in workloads(args.n, rng).items():
        times = {}
        for label, impl in backends.items():
            call(impl)  # warm-up and JIT compilation
            times[label] = min(timeit.repeat(lambda: call(impl), number=1, repeat=args.repeat))
        print(f"{name:<30}{times['numba']:>10.4f}{times['numpy']:>10.4f}{times['numpy'] / times['numba']:>9.1f}x")

    mc_n = args.n
    jit, plain = end_to_end("0", mc_n), end_to_end("1", mc_n)
    print(f"{'monte carlo lower VaR':<30}{jit:>10.4f}{plain:>10.4f}{plain / jit:>9.1f}x")


if __name__ == "__main__":
    main()
