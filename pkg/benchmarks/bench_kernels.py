"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--n 10000] [--deg 20] [--lap 200] [--repeat 3]

Times Louvain on one generated layer and the assignment solver on random
square matrices with each backend, checks that both backends return
identical results, and prints a small table.
"""

import argparse
import statistics
import time

import numpy as np

from mlncraft import louvain
from mlncraft._backend import compiled_kernels, python_kernels
from mlncraft.generate import SyntheticSpec, generate_synthetic


def _median_time(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times), out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--deg", type=int, default=20)
    parser.add_argument("--lap", type=int, default=200, help="side of the assignment matrices")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if compiled_kernels is None:
        raise SystemExit("compiled kernels are not built; run 'pip install -e .' with Cython available")

    net, _ = generate_synthetic(SyntheticSpec.from_shorthand(f"1x{args.n},deg{args.deg}"))
    layer = net.layers[0]
    rng = np.random.default_rng(0)
    w = rng.integers(0, 50, size=(args.lap, args.lap)).astype(float)
    card = (w > 0).astype(float)

    rows = []
    results = {}
    for name, kernels in (("cython", compiled_kernels), ("python", python_kernels)):
        t_louvain, labels = _median_time(lambda: louvain(layer, seed=0, kernels=kernels), args.repeat)
        t_lap, assignment = _median_time(lambda: kernels.lap_max_lex(w, card), args.repeat)
        results[name] = (labels, assignment[0])
        rows.append((name, t_louvain, t_lap))

    same = np.array_equal(results["cython"][0], results["python"][0]) and np.array_equal(
        results["cython"][1], results["python"][1]
    )
    print(f"layer: n={layer.n} m={layer.m}; assignment: {args.lap}x{args.lap}; median of {args.repeat}")
    print(f"{'backend':<8} {'louvain s':>10} {'assignment s':>13}")
    for name, t1, t2 in rows:
        print(f"{name:<8} {t1:>10.4f} {t2:>13.4f}")
    print(f"speedup  {rows[1][1] / rows[0][1]:>10.1f}x {rows[1][2] / rows[0][2]:>12.1f}x")
    print(f"identical results: {same}")


if __name__ == "__main__":
    main()
