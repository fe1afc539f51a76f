"""Bayesian estimation when the Fisher matrix is singular.

With one measurement per run the data only fix the probability of a single
outcome, so the posterior over two fields is a ridge along a level set. More
data makes the ridge thinner but never shorter. With two measurements per run
the posterior collapses onto the true point.

Run:  python demos/03_posterior_ridge.py
"""
import numpy as np

from seqsense import bayes, models, protocol

truth = [0.1, 0.35]
model = models.heisenberg(6, k=2)
grid = bayes.ParameterGrid(((0.0, 0.5, 51), (0.0, 0.5, 51)), model.labels)

for n_seq in (1, 2):
    sched = protocol.default_schedule(model, n_seq)
    dist = protocol.trajectory_distribution(model, truth, sched)
    for m in (10 ** 3, 10 ** 5):
        rec = protocol.sample_record(dist, m, rng=np.random.default_rng([0, n_seq, m]))
        post = bayes.posterior(model, sched, grid, rec)
        est = bayes.map_estimate(post)
        region = bayes.credible_region(post, 0.95)
        lo_hi = region.extent(grid)
        print(f"n_seq={n_seq} M={m:>6}: MAP={np.round(est.values.values, 3)}  "
              f"95% region {region.cells:4d} cells, extent {np.round(lo_hi, 2)}")

# a coarse picture of the n_seq = 1 ridge at M = 1e5
sched = protocol.default_schedule(model, 1)
rec = protocol.sample_record(protocol.trajectory_distribution(model, truth, sched), 10 ** 5, seed=0)
region = bayes.credible_region(bayes.posterior(model, sched, grid, rec), 0.95)
# pool 3x3 blocks; plain subsampling would skip most of the thin ridge
mask = region.mask.reshape(17, 3, 17, 3).any(axis=(1, 3))
print("\nn_seq=1 credible cells (rows B1, columns B2, 3x3 blocks):")
for row in mask:
    print("  " + "".join("#" if c else "." for c in row))
