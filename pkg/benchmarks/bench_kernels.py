"""Time the numba and numpy kernel backends against each other.

    python benchmarks/bench_kernels.py [--rows 5000] [--cols 4000] [--density 2e-4] [--k 10]

Each kernel is warmed up once (so JIT compilation is excluded) and then
timed as the best of ``--repeat`` runs. A short ``factorize`` run is timed
the same way. Results from both backends are compared to catch drift.
"""

import argparse
import time

import numpy as np
import scipy.sparse as sp

from wikicite import _kernels
from wikicite.nmf import factorize


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=5000)
    p.add_argument("--cols", type=int, default=4000)
    p.add_argument("--density", type=float, default=2e-4)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--iterations", type=int, default=200)
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    X = sp.random(args.rows, args.cols, density=args.density, format="csr", random_state=rng,
                  data_rvs=lambda n: rng.integers(1, 5, n).astype(float))
    X.sort_indices()
    W = rng.random((args.rows, args.k))
    HT = rng.random((args.cols, args.k))
    csr = (X.indptr, X.indices, X.data)

    backends = [b for b in (_kernels.numpy_backend, _kernels.numba_backend) if b is not None]
    print(f"X {args.rows}x{args.cols}, nnz {X.nnz}, k {args.k}; active backend: {_kernels.BACKEND}")
    print(f"{'kernel':<20}" + "".join(f"{b.name:>12}" for b in backends))

    results = {}
    rows = {
        "csr_matmul": lambda b: b.csr_matmul(*csr, HT),
        "csr_rmatmul": lambda b: b.csr_rmatmul(*csr, W, args.cols),
        "csr_residual_terms": lambda b: b.csr_residual_terms(*csr, W, HT),
        f"factorize x{args.iterations}": lambda b: factorize(
            X, args.k, iterations=args.iterations, seed=args.seed, backend=b).final_error,
    }
    for label, call in rows.items():
        times = []
        for b in backends:
            results[label, b.name] = call(b)
            times.append(best_of(lambda: call(b), args.repeat))
        print(f"{label:<20}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times))

    if len(backends) == 2:
        for label in rows:
            a, b = (np.asarray(results[label, n.name], dtype=float) for n in backends)
            rel = float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(a))), 1e-300))
            print(f"max rel diff {label}: {rel:.2e}")


if __name__ == "__main__":
    main()
