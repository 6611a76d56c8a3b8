"""Success rate of QWF and PQTAF as the number of measurements grows.

Run: python demos/phase_transition.py [--d 20] [--trials 10]
Below roughly n = 6d the plain solver rarely lands on the signal; a few
multiples of d later it almost always does.  The pure-quaternion variant
gets there with fewer measurements.
"""

import argparse

from quatpr.algorithms import SolverConfig
from quatpr.harness import SweepSpec, onset_ratio, rows_to_csv, sweep_rows

parser = argparse.ArgumentParser()
parser.add_argument("--d", type=int, default=20)
parser.add_argument("--trials", type=int, default=10)
args = parser.parse_args()

ratios = tuple(range(3, 12))
# stop once a run is 100x inside the success threshold
cfg = SolverConfig(stop_tol=1e-7)
for algo in ("qwf", "pqtaf"):
    rows = sweep_rows(SweepSpec(d=args.d, ratios=ratios, trials=args.trials, algo=algo, cfg=cfg))
    print(f"--- {algo} ---")
    print(rows_to_csv(rows), end="")
    print(f"full-success onset: n/d = {onset_ratio(rows):g}\n")
