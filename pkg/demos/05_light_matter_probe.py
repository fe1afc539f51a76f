"""Two atoms and a cavity: a local non-singular bound need not mean a unique answer.

Measuring atom 1 of a two-atom Jaynes-Cummings system repeatedly makes the
Fisher matrix for (omega1, omega2) invertible after two readouts. At the
default step omega_a tau = 2 pi, though, swapping the two atomic frequencies
about omega_a leaves every trajectory probability unchanged. The likelihood
then has two equally good peaks, and which one the MAP picks is down to noise.

Run:  python demos/05_light_matter_probe.py
"""
import numpy as np

from seqsense import bayes, fisher, models, protocol

model = models.jaynes_cummings(unknown=("omega1", "omega2"))
truth = [0.9, 1.1]
for n_seq in (1, 2, 3):
    sched = protocol.default_schedule(model, n_seq)
    f = fisher.model_cfi(model, truth, sched)
    rep = fisher.singularity_report(f)
    print(f"n_seq={n_seq}: outcomes {rep.outcome_count}, singular {rep.singular}, "
          f"Tr[F^-1] = {fisher.scalar_bound(f.matrix):.4g}")

sched = protocol.default_schedule(model, 2)
a = protocol.trajectory_distribution(model, truth, sched).probabilities
b = protocol.trajectory_distribution(model, truth[::-1], sched).probabilities
print(f"\nmax |p(xi | 0.9, 1.1) - p(xi | 1.1, 0.9)| = {np.max(np.abs(a - b)):.1e}")

grid = bayes.ParameterGrid(((0.6, 1.4, 41), (0.6, 1.4, 41)), model.labels)
rec = protocol.sample_record(protocol.trajectory_distribution(model, truth, sched), 10 ** 5, seed=1)
post = bayes.posterior(model, sched, grid, rec).as_array()
i, j = (int(np.argmin(np.abs(grid.axis_values(0) - v))) for v in truth)
print(f"posterior weight at truth {post[i, j]:.3f}, at mirror {post[j, i]:.3f}")
