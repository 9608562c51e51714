#!/usr/bin/env python3
"""Benchmark the incremental-training token loop: compiled kernel vs
pure-numpy fallback.

The token loop dominates incremental experiments (one sparse update per
token over a dense weight matrix), which is why it is the one compiled
hot spot in the package.  Both backends implement the same contract;
this script times them on the same synthetic workload and checks that
they produce identical weights.
"""

import argparse
import time

import numpy as np

from ldlkit import _wh_numpy

try:
    from ldlkit import _wh_kernel
except ImportError:
    _wh_kernel = None


def make_workload(n_entries, n_cues, dim, n_tokens, active, seed=0):
    rng = np.random.default_rng(seed)
    indptr = np.zeros(n_entries + 1, dtype=np.int64)
    rows = [np.sort(rng.choice(n_cues, size=active, replace=False)) for _ in range(n_entries)]
    indptr[1:] = np.cumsum([r.size for r in rows])
    indices = np.concatenate(rows).astype(np.int64)
    S = rng.normal(size=(n_entries, dim))
    stream = rng.integers(0, n_entries, size=n_tokens).astype(np.int64)
    return indptr, indices, S, stream


def run(backend, indptr, indices, S, stream, eta, n_cues, dim, repeats):
    best = float("inf")
    W = None
    for _ in range(repeats):
        W = np.zeros((n_cues, dim))
        snapshots = np.zeros((0, n_cues, dim))
        checkpoints = np.zeros(0, dtype=np.int64)
        start = time.perf_counter()
        backend.run_stream(W, indptr, indices, S, stream, eta, checkpoints, snapshots)
        best = min(best, time.perf_counter() - start)
    return best, W


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--entries", type=int, default=1000)
    ap.add_argument("--cues", type=int, default=1500)
    ap.add_argument("--dim", type=int, default=1500)
    ap.add_argument("--tokens", type=int, default=20000)
    ap.add_argument("--active", type=int, default=12, help="active cues per entry")
    ap.add_argument("--eta", type=float, default=0.001)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    indptr, indices, S, stream = make_workload(
        args.entries, args.cues, args.dim, args.tokens, args.active
    )
    print(f"workload: {args.tokens} tokens, {args.cues}x{args.dim} weights, "
          f"{args.active} active cues per entry")

    t_py, W_py = run(_wh_numpy, indptr, indices, S, stream, args.eta,
                     args.cues, args.dim, args.repeats)
    print(f"python (numpy) backend: {t_py:.3f} s  "
          f"({args.tokens / t_py:,.0f} tokens/s)")

    if _wh_kernel is None:
        print("cython backend: not built (pip install -e . compiles it)")
        return
    t_cy, W_cy = run(_wh_kernel, indptr, indices, S, stream, args.eta,
                     args.cues, args.dim, args.repeats)
    print(f"cython backend:         {t_cy:.3f} s  "
          f"({args.tokens / t_cy:,.0f} tokens/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    diff = np.abs(W_py - W_cy).max()
    print(f"max |W_py - W_cy| = {diff:.3e}")
    assert diff < 1e-10, "backends disagree"


if __name__ == "__main__":
    main()
