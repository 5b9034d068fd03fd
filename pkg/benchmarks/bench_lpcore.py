"""Compare the compiled and pure-Python simplex kernels.

Times the two canonical LPs behind the Pareto geometry on random payoff
matrices of the sizes met in experiments, and checks that both kernels
return the same optimal values.

Usage::

    python benchmarks/bench_lpcore.py --repeats 200
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from molts import lp


def _time(fn, problems, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for P in problems:
            fn(P)
        best = min(best, time.perf_counter() - start)
    return best / len(problems)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20, help="timing repetitions (best is kept)")
    parser.add_argument("--problems", type=int, default=50, help="random problems per size")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    kernels = lp.kernels()
    if "cython" not in kernels:
        print("compiled kernel not built; only the pure-Python kernel is available")
    rng = np.random.default_rng(args.seed)
    print(f"{'problem':<10} {'L x K':>7} " + " ".join(f"{k + ' us':>12}" for k in kernels) + f" {'speedup':>8}")
    for L, K in [(2, 10), (4, 10), (4, 50), (8, 50)]:
        problems = [rng.uniform(-1, 1, (L, K)) for _ in range(args.problems)]
        for name, solve in (("maximin", lp.maximin_over_simplex),
                            ("dominance", lambda P, kernel: lp.dominance_margin(P, P.mean(axis=1) - 0.1, kernel=kernel))):
            times, values = {}, {}
            for kname, kernel in kernels.items():
                times[kname] = _time(lambda P: solve(P, kernel=kernel), problems, args.repeats)
                values[kname] = np.array([solve(P, kernel=kernel).value for P in problems], dtype=float)
            if len(values) == 2:
                a, b = values.values()
                assert np.allclose(a, b, atol=1e-9, equal_nan=True), "kernels disagree"
            speed = times["python"] / times["cython"] if "cython" in times else 1.0
            cells = " ".join(f"{1e6 * t:12.1f}" for t in times.values())
            print(f"{name:<10} {f'{L}x{K}':>7} {cells} {speed:8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
