"""Wall-clock cost of hard/easy generation on random similarity matrices.

    python3 scripts/timing.py --classes 100 200 400 --tasks 10
"""
import argparse
import time

import numpy as np

from edgecil.seqgen import GenerationConfig, generate_easy, generate_hard
from edgecil.simio import SimilarityMatrix


def random_sim(n, seed):
    a = np.random.default_rng(seed).uniform(size=(n, n))
    a = np.triu(a, 1) + np.triu(a, 1).T
    np.fill_diagonal(a, 1.0)
    return SimilarityMatrix.from_array(a)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--classes", type=int, nargs="+", default=[100, 200])
    ap.add_argument("--tasks", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--single-start", action="store_true")
    args = ap.parse_args()
    cfg = GenerationConfig(multi_start=not args.single_start)
    for n in args.classes:
        sim = random_sim(n, n)
        for name, fn in (("hard", generate_hard), ("easy", generate_easy)):
            best = min(_clock(fn, sim, args.tasks, cfg) for _ in range(args.repeats))
            print(f"N={n:4d} K={args.tasks:3d} {name}: {best:.3f}s")


def _clock(fn, sim, k, cfg):
    t0 = time.perf_counter()
    fn(sim, k, cfg)
    return time.perf_counter() - t0


if __name__ == "__main__":
    main()
