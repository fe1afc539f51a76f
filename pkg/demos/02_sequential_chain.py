"""Repeated measurements of one spin lift the singularity of a chain probe.

We watch only the last spin of a 4-site Heisenberg chain and try to learn the
transverse fields on the first k sites. A single sigma_z readout has two
outcomes and cannot resolve more than one parameter. Measuring again without
resetting the chain multiplies the number of outcome sequences by two each
time, and once 2^n_seq >= k + 1 the Fisher matrix becomes invertible.

Run:  python demos/02_sequential_chain.py
"""
import numpy as np

from seqsense import fisher, models, protocol

N, B = 4, 0.5
for k in (1, 2, 3):
    model = models.heisenberg(N, k=k)
    cells = []
    for n_seq in range(1, 5):
        sched = protocol.default_schedule(model, n_seq)
        f = fisher.model_cfi(model, [B] * k, sched)
        rep = fisher.singularity_report(f)
        cells.append("SINGULAR" if rep.singular else f"{fisher.trace_inverse(f):8.3f}")
    print(f"k={k}: " + "  ".join(f"{c:>8}" for c in cells))

# the outcomes are correlated: the joint distribution is not a product
model = models.heisenberg(N, k=2)
dist = protocol.trajectory_distribution(model, [B, B], protocol.default_schedule(model, 2))
joint = dist.probabilities.reshape(2, 2)
print("\np(m1, m2):\n", np.round(joint, 4))
print("product of marginals:\n", np.round(np.outer(joint.sum(1), joint.sum(0)), 4))
