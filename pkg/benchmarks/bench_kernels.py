"""Time the numba and numpy paths of the hot kernels on identical inputs.

    python3 benchmarks/bench_kernels.py [--trials 20000] [--points 100000]
"""
import argparse
import time

import numpy as np

from kcover import _kernels
from kcover.packing import PackingConfig, empirical_alpha_search


def best_of(fn, repeat=3):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=20_000)
    ap.add_argument("--points", type=int, default=100_000)
    ap.add_argument("--disks", type=int, default=20)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 5, (args.points, 2))
    ctr = rng.uniform(0, 5, (args.disks, 2))

    print(f"{'kernel':<16}{'backend':<8}{'seconds':>10}  result")
    results = {}
    for b in backends:
        # warm-up triggers compilation so it is not timed
        _kernels.contains_matrix(pts[:10], ctr, 1.0, backend=b)
        empirical_alpha_search(PackingConfig(1.0, trials=10), backend=b)

        t, m = best_of(lambda: _kernels.contains_matrix(pts, ctr, 1.0 + 1e-9, backend=b))
        print(f"{'contains_matrix':<16}{b:<8}{t:>10.4f}  {int(m.sum())} memberships")
        results.setdefault("contains", []).append(m)

        cfg = PackingConfig(1.0, trials=args.trials, seed=0)
        t, r = best_of(lambda: empirical_alpha_search(cfg, backend=b), repeat=1)
        print(f"{'alpha_search':<16}{b:<8}{t:>10.4f}  best_count={r.best_count}")
        results.setdefault("alpha", []).append((r.best_count, [tuple(d.center) for d in r.disks]))

    if len(backends) == 2:
        same = np.array_equal(*results["contains"]) and results["alpha"][0] == results["alpha"][1]
        print("backends agree:", same)


if __name__ == "__main__":
    main()
