"""Residual norm, mean leverage gain and CV score per order for one noisy window."""
import argparse
from pathlib import Path

from sgcv.experiments import run_bias_variance_trace

p = argparse.ArgumentParser(description=__doc__)
p.add_argument("--n", type=int, default=16)
p.add_argument("--seed", type=int, default=0)
p.add_argument("--out", type=Path, default=Path("results/bias_variance.csv"))
args = p.parse_args()

trace = run_bias_variance_trace(args.n, args.seed)
args.out.parent.mkdir(parents=True, exist_ok=True)
args.out.write_text(trace.to_csv())
print(trace.to_csv(), end="")
print(f"selected order: {trace.best_order}")
