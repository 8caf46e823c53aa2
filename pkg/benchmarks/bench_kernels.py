"""Time the compiled and pure-Python kernel backends side by side.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import math
import timeit

import numpy as np

from mabprune import _backend
from mabprune import tree as tree_mod
from mabprune.dataset import SyntheticSpec, generate_synthetic


def cases(rng):
    data = generate_synthetic(SyntheticSpec(n_samples=5000, n_features=10, n_informative=5, label_noise=0.1, seed=0))
    X, y = np.ascontiguousarray(data.features), np.ascontiguousarray(data.labels)
    idx = np.arange(len(y), dtype=np.int64)
    tree = tree_mod.fit(data)
    means = rng.random(112)
    plays = rng.integers(1, 50, 112).astype(float)
    a = rng.integers(1, 40, 112).astype(float)
    b = rng.integers(1, 40, 112).astype(float)
    return {
        "route (5000 rows)": lambda k: k.route(X, tree.left, tree.right, tree.feature, tree.threshold, 0),
        "best_split (5000 x 10)": lambda k: k.best_split(X, y, idx, 2, 3),
        "kl_ucb_batch (112 arms)": lambda k: k.kl_ucb_batch(means, plays, math.log(1000), 1e-6),
        "beta_quantile_batch (112 arms)": lambda k: k.beta_quantile_batch(a, b, 0.999, 1e-8),
        "fit depth 7 (5000 rows)": lambda k: (setattr(tree_mod, "kernels", k), tree_mod.fit(data)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args()
    backends = {}
    for name in _backend.AVAILABLE:
        try:
            backends[name] = _backend.load(name)
        except ImportError:
            print(f"backend {name!r} unavailable, skipped")
    rows = []
    for label, fn in cases(np.random.default_rng(0)).items():
        times = {}
        for name, k in backends.items():
            number = 1 if label.startswith(("fit", "best_split")) and name == "python" else 3
            times[name] = min(timeit.repeat(lambda: fn(k), number=number, repeat=args.repeat)) / number
        rows.append((label, times))
    tree_mod.kernels = _backend.kernels
    print(f"{'kernel':34s}" + "".join(f"{n:>14s}" for n in backends) + (f"{'speedup':>10s}" if len(backends) == 2 else ""))
    for label, times in rows:
        line = f"{label:34s}" + "".join(f"{times[n] * 1e3:12.3f}ms" for n in backends)
        if len(times) == 2:
            line += f"{times['python'] / times['cython']:9.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({label: times for label, times in rows}, fh, indent=1)


if __name__ == "__main__":
    main()
