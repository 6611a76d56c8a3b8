"""Quaternion versus real recovery of the same color signal at equal budgets.

Run: python demos/quaternion_vs_real.py [--d 20] [--trials 10]
A pure quaternion signal is either measured directly (n quaternion
intensities) or treated as real data: one real problem per color channel
(mono) or one stacked real signal of length 3d (concat).  Each route gets
n real-valued observations.
"""

import argparse

from quatpr.algorithms import SolverConfig
from quatpr.harness import SweepSpec, onset_ratio, sweep_rows

parser = argparse.ArgumentParser()
parser.add_argument("--d", type=int, default=20)
parser.add_argument("--trials", type=int, default=10)
args = parser.parse_args()

ratios = tuple(range(3, 14, 2))
# stop once a run is 100x inside the success threshold
cfg = SolverConfig(stop_tol=1e-7)
runs = [("pqtaf", "quaternion"), ("taf", "mono"), ("taf", "concat")]
print("algo    model       " + " ".join(f"{r:>5}" for r in ratios) + "   onset")
for algo, model in runs:
    rows = sweep_rows(SweepSpec(d=args.d, ratios=ratios, trials=args.trials, algo=algo, model=model, cfg=cfg))
    rates = " ".join(f"{r.rate:5.2f}" for r in rows)
    print(f"{algo:<7} {model:<11} {rates}   {onset_ratio(rows):g}")
