"""Six-class / three-task experiment: full 90-sequence landscape vs. EDGE and RS.

Writes report.json, report.txt and the plot-data files into the output directory.

    python3 scripts/enumerable_experiment.py --out runs/cifar6 --noise-std 0.02
"""
import argparse
from pathlib import Path

from edgecil.cli import main as cli_main

FIXTURE = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "cifar6_embeddings.csv"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--embeddings", default=str(FIXTURE))
    ap.add_argument("--out", default="runs/cifar6")
    ap.add_argument("--noise-std", type=float, default=0.02)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    common = ["protocol", "--embeddings", args.embeddings, "-k", "3", "--seed", str(args.seed),
              "--noise-std", str(args.noise_std)]
    cli_main(common + ["--format", "json", "--artifacts", str(out), "-o", str(out / "report.json")])
    cli_main(common + ["-o", str(out / "report.txt")])
    print((out / "report.txt").read_text(), end="")


if __name__ == "__main__":
    main()
