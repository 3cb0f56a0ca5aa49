#!/usr/bin/env python3
"""Times the classifier kernels on both backends (compiled vs numpy).

Usage: python benchmarks/bench_kernels.py [--batch 32] [--dim 256] [--repeat 200]

Covers the shapes the trainer actually runs (batch x dim -> 128 -> 3) plus a
full 20-epoch training run per backend.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from proviz.nn.kernels import available_backends


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_backend(name, impl, batch, dim, hidden, repeat, sparse=False):
    rng = np.random.default_rng(0)
    x = np.ascontiguousarray(rng.normal(size=(batch, dim)))
    if sparse:
        # hashed bag-of-words regime: ~10 occupied buckets per row
        mask = rng.random(size=(batch, dim)) < (10 / dim)
        x = np.ascontiguousarray(np.where(mask, x, 0.0))
    w1 = np.ascontiguousarray(rng.normal(size=(dim, hidden)))
    b1 = rng.normal(size=hidden)
    w2 = np.ascontiguousarray(rng.normal(size=(hidden, 3)))
    b2 = rng.normal(size=3)
    y = rng.integers(0, 3, size=batch).astype(np.int64)

    hidden_pre, _, logits = impl.dense_forward(x, w1, b1, w2, b2)
    logits = np.ascontiguousarray(np.asarray(logits))
    _, dlogits = impl.cross_entropy(logits, y)
    dlogits = np.ascontiguousarray(np.asarray(dlogits))
    hidden_pre = np.ascontiguousarray(np.asarray(hidden_pre))

    param = rng.normal(size=dim * hidden)
    grad = np.ascontiguousarray(rng.normal(size=dim * hidden))
    m, v = np.zeros_like(param), np.zeros_like(param)

    rows = {
        "dense_forward": time_call(lambda: impl.dense_forward(x, w1, b1, w2, b2), repeat),
        "cross_entropy": time_call(lambda: impl.cross_entropy(logits, y), repeat),
        "dense_backward": time_call(lambda: impl.dense_backward(x, hidden_pre, dlogits, w2), repeat),
        "adam_step": time_call(lambda: impl.adam_step(param, grad, m, v, 1, 1e-3, 0.9, 0.999, 1e-8), repeat),
    }
    return rows


def bench_training(backend_name):
    import importlib
    import os
    import subprocess
    import sys

    # fresh interpreter so the import-time backend selection applies
    code = (
        "import time;"
        "from proviz.nn.corpus import generate_corpus;"
        "from proviz.nn.embedding import HashingEmbedder;"
        "from proviz.nn.train import TrainConfig, train;"
        "c=generate_corpus();p=HashingEmbedder();"
        "t=time.perf_counter();r=train(c,p,TrainConfig(seed=1234));"
        "print(f'{time.perf_counter()-t:.2f}s acc={r.test_accuracy:.3f}')"
    )
    env = dict(os.environ, PROVIZ_KERNELS=backend_name)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    return out.stdout.strip() or out.stderr.strip().splitlines()[-1]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument("--dim", type=int, default=256)
    parser.add_argument("--hidden", type=int, default=128)
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"shape: batch={args.batch} dim={args.dim} hidden={args.hidden} (best of {args.repeat})\n")

    for sparse in (False, True):
        label = "sparse rows (hashed bag-of-words)" if sparse else "dense rows"
        results = {
            name: bench_backend(name, impl, args.batch, args.dim, args.hidden, args.repeat, sparse=sparse)
            for name, impl in backends.items()
        }
        kernels = list(next(iter(results.values())))
        header = f"{label:<16}" + "".join(f"{name:>12}" for name in results)
        if len(results) == 2:
            header += f"{'ratio':>9}"
        print(header)
        for kernel in kernels:
            row = f"{kernel:<16}" + "".join(f"{results[name][kernel] * 1e6:>10.1f}us" for name in results)
            if len(results) == 2:
                a, b = (results[name][kernel] for name in results)
                row += f"{a / b:>9.2f}"
            print(row)
        print()

    print("\nfull 20-epoch training run (seeded 1,200-example corpus):")
    for name in backends:
        print(f"  {name:<8} {bench_training(name)}")


if __name__ == "__main__":
    main()
