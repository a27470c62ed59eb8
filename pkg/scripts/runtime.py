"""Median runtime of brute-force against order-recursive leave-one-out CV."""
import argparse
from pathlib import Path

from sgcv.bench import run_bench

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--reps", type=int, default=1000)
p.add_argument("--out", type=Path, default=Path("results/runtime.csv"))
args = p.parse_args()

report = run_bench((5, 10, 15, 20), reps=args.reps)
args.out.parent.mkdir(parents=True, exist_ok=True)
args.out.write_text(report.to_csv())
print(report.environment)
print(report.to_csv(), end="")
