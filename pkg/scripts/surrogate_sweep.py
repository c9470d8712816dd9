"""Repeat the enumerable protocol over many random embedding sets and summarize EDGE vs RS.

    python3 scripts/surrogate_sweep.py --trials 50 --noise-std 0.02
"""
import argparse

import numpy as np

from edgecil.protocol import AccuracySource, ProtocolConfig, run_protocol
from edgecil.simio import EmbeddingSet, cosine_similarity
from edgecil.surrogate import SurrogateParams


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--classes", type=int, default=6)
    ap.add_argument("--tasks", type=int, default=3)
    ap.add_argument("--dim", type=int, default=16)
    ap.add_argument("--noise-std", type=float, default=0.02)
    args = ap.parse_args()

    rows = []
    for trial in range(args.trials):
        rng = np.random.default_rng(1000 + trial)
        v = np.abs(rng.normal(size=(args.classes, args.dim)))
        emb = EmbeddingSet(tuple(f"c{i}" for i in range(args.classes)), v)
        src = AccuracySource.from_surrogate(emb, args.tasks, SurrogateParams(noise_std=args.noise_std, seed=trial))
        rep = run_protocol(cosine_similarity(emb), src, ProtocolConfig(n_tasks=args.tasks))
        c = rep["comparison"]
        rows.append((c["edge"]["jsd"], c["rs"]["jsd"], c["edge"]["w1"], c["rs"]["w1"]))
    r = np.array(rows)
    print(f"{args.trials} landscapes, N={args.classes}, K={args.tasks}, noise={args.noise_std}")
    print(f"JSD  EDGE {r[:, 0].mean():.4f}  RS {r[:, 1].mean():.4f}  EDGE better in {np.sum(r[:, 0] < r[:, 1])}")
    print(f"W1   EDGE {100 * r[:, 2].mean():.3f}%  RS {100 * r[:, 3].mean():.3f}%  EDGE better in {np.sum(r[:, 2] < r[:, 3])}")


if __name__ == "__main__":
    main()
