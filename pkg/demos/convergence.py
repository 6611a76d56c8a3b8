"""Linear convergence of QWF on one problem.

Run: python demos/convergence.py
Prints every 100th iterate's distance to the signal (modulo the right phase)
and the slope of log10(error) fitted over the pre-plateau part of the run.
"""

import numpy as np

from quatpr.algorithms import SolverConfig
from quatpr.harness import linear_fit, trace_run

tr = trace_run(d=30, ratio=10, algo="qwf", cfg=SolverConfig(iters=1500), seed=1)
for it, err in zip(tr.iters[::100], tr.errors[::100]):
    print(f"iter {it:5d}  dist {err:.3e}")

err = np.asarray(tr.errors)
keep = err > 1e-10
slope, r2 = linear_fit(np.asarray(tr.iters)[keep], np.log10(err[keep]))
print(f"\nlog10 error falls {-slope:.4f} per iteration (R^2 = {r2:.4f})")
print(f"error shrinks by 10x every {-1 / slope:.0f} iterations")
