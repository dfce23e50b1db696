"""Time the compiled Holevo kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --repeat 5
"""
import argparse
import json
import timeit

import numpy as np

from su11bounds import kernels
from su11bounds.bounds import hcrb_pure
from su11bounds.kernels import _holevo_py
from su11bounds.testing import random_frame


def _best(fn, number, repeat):
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def bench_kernel(mod, d, r, rng, repeat):
    X = rng.standard_normal((d, 2 * r))
    Xs = rng.standard_normal((256, d, 2 * r))
    return {
        "value": _best(lambda: mod.holevo_value(X), 2000, repeat),
        "values_x256": _best(lambda: mod.holevo_values(Xs), 20, repeat),
        "subgradient": _best(lambda: mod.holevo_subgradient(X), 2000, repeat),
        "smoothed": _best(lambda: mod.smoothed_holevo(X, 1e-4), 2000, repeat),
    }


def bench_solver(mod, frames, repeat):
    saved = kernels._pick
    kernels._pick = lambda X: mod
    try:
        return _best(lambda: [hcrb_pure(f) for f in frames], 1, repeat) / len(frames)
    finally:
        kernels._pick = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="print machine-readable results")
    args = ap.parse_args()

    backends = {"python": _holevo_py}
    if kernels.compiled_backend is not None:
        backends["compiled"] = kernels.compiled_backend
    else:
        print("compiled extension not built; timing the numpy fallback only")

    results = {}
    for d, r in [(2, 1), (4, 2), (4, 4)]:
        for name, mod in backends.items():
            results[f"{name} d={d} r={r}"] = bench_kernel(mod, d, r, np.random.default_rng(args.seed), args.repeat)
    rng = np.random.default_rng(args.seed)
    frames = [random_frame(rng, 4, 3) for _ in range(4)]
    for name, mod in backends.items():
        results[f"{name} hcrb_pure d=4 r=3"] = {"solve": bench_solver(mod, frames, args.repeat)}

    if args.json:
        print(json.dumps(results, indent=2))
        return
    print(f"{'case':<28}{'op':<14}{'seconds/call':>14}{'speedup':>10}")
    for key, ops in results.items():
        other = key.replace("compiled", "python", 1)
        for op, t in ops.items():
            speed = results[other][op] / t if key.startswith("compiled") else 1.0
            print(f"{key:<28}{op:<14}{t:>14.3e}{speed:>9.1f}x")


if __name__ == "__main__":
    main()
