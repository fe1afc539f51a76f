"""Waiting longer before some measurements than others.

Three sigma_z readouts share a fixed total time J T = 12. Equal spacing gives
Tr[F^-1] of about 1.52 at B = (0.5, 0.5). Scanning the first two intervals
(the third is whatever time is left) finds a much better schedule.

Run:  python demos/04_timing_search.py
"""
import numpy as np

from seqsense import models, optimize

model = models.heisenberg(4, k=2)
res = optimize.timing_landscape(model, [0.5, 0.5], 12.0, points=30)
print(f"uniform timing:  {res.baseline_objective:.4f}")
print(f"best timing:     {res.best_objective:.4f} at tau = {np.round(res.best_schedule.taus, 3)}")
print(f"feasible points: {int(np.isfinite(res.landscape).sum())}")

# coarse heat map: lower is better, blank is infeasible
land = res.landscape[::3, ::3]
shades = " .:-=+*#%@"
finite = land[np.isfinite(land)]
lo, hi = np.log(finite.min()), np.log(np.percentile(finite, 95))
print("\nlog Tr[F^-1] (rows tau1, columns tau2; denser marks are lower):")
for row in land:
    line = ""
    for v in row:
        if not np.isfinite(v):
            line += " "
        else:
            level = int(np.clip((hi - np.log(v)) / (hi - lo), 0, 1) * (len(shades) - 1))
            line += shades[level]
    print("  " + line)
