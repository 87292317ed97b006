#!/usr/bin/env python3
"""Benchmark the similarity kernels: compiled extension vs pure Python.

Builds synthetic revision pairs, packs their sentences once, then times the
full pairwise similarity matrix under each available backend and checks the
outputs are bit-identical.

Usage: python benchmarks/bench_similarity.py [--pairs 200] [--repeats 3]
"""

import argparse
import time

import numpy as np

from revlab._kernels import BACKEND, available_backends
from revlab.align import _pack_side, norm_lexical
from revlab.synth import make_corpus


def build_workload(n_pairs: int):
    pairs, _, _ = make_corpus(n_pairs, seed=424242, difficulty="hard")
    packed = []
    cells = 0
    for pair in pairs:
        old = [norm_lexical(s.text) for s in pair.old.ensure_sentences()]
        new = [norm_lexical(s.text) for s in pair.new.ensure_sentences()]
        tok_vocab, tri_vocab = {}, {}
        side_a = _pack_side(old, tok_vocab, tri_vocab)
        side_b = _pack_side(new, tok_vocab, tri_vocab)
        packed.append((side_a, side_b))
        cells += len(old) * len(new)
    return packed, cells


def run(kernel, packed, token_weight=0.5):
    outputs = []
    start = time.perf_counter()
    for side_a, side_b in packed:
        outputs.append(kernel(*side_a, *side_b, token_weight))
    return time.perf_counter() - start, outputs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"selected backend at import: {BACKEND}")
    if "cython" not in backends:
        print("compiled kernel not built; timing pure Python only "
              "(pip install -e . --no-build-isolation builds it)")

    packed, cells = build_workload(args.pairs)
    print(f"workload: {args.pairs} pairs, {cells} similarity cells\n")

    timings = {}
    results = {}
    for name, kernel in sorted(backends.items()):
        best = float("inf")
        outputs = None
        for _ in range(args.repeats):
            elapsed, outputs = run(kernel, packed)
            best = min(best, elapsed)
        timings[name] = best
        results[name] = outputs
        print(f"{name:>8}: {best * 1000:9.1f} ms "
              f"({cells / best / 1e6:6.2f} M cells/s)")

    if len(results) == 2:
        same = all(
            np.array_equal(a, b)
            for a, b in zip(results["python"], results["cython"])
        )
        print(f"\noutputs bit-identical: {same}")
        print(f"speedup: {timings['python'] / timings['cython']:.1f}x")


if __name__ == "__main__":
    main()
