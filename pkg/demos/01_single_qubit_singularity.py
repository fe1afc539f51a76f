"""A single qubit cannot reveal both of its angles in one projective shot.

A pure qubit state |psi(theta, phi)> carries two unknowns. Its quantum
Fisher matrix is diag(1, sin^2 theta), which is invertible away from the
poles, so in principle both angles are learnable. Any two-outcome projective
measurement, however, produces a classical Fisher matrix of rank one: there
is only one independent probability to differentiate.

A four-outcome POVM (a random choice between the X and Y axes) has enough
outcomes, and its Fisher matrix is singular only on the XZ-plane.

Run:  python demos/01_single_qubit_singularity.py
"""
import numpy as np

from seqsense import fisher, models
from seqsense.models import QubitToy
from seqsense.protocol import MeasurementBasis

rng = np.random.default_rng(7)
theta, phi = 1.1, 0.8
toy = QubitToy(theta, phi)

print("QFI closed form:\n", models.analytic_qfi_qubit(toy))
generic = fisher.qfi_pure(lambda x: models.qubit_pure_state(*x), [theta, phi])
print("QFI from finite differences:\n", np.round(generic.matrix, 8))

print("\nTwo-outcome projective measurements in random bases:")
for _ in range(4):
    basis = MeasurementBasis(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
    f = models.analytic_cfi_qubit_projective(toy, basis)
    rep = fisher.singularity_report(f)
    print(f"  basis=({basis.theta_prime:.2f}, {basis.phi_prime:.2f})  det F = {f.det:.2e}  rank {rep.rank}")

print("\nFour-outcome POVM:")
for p in (phi, np.pi / 2, 0.0):
    f = models.analytic_cfi_qubit_povm4(theta, p)
    print(f"  phi={p:.2f}  det F = {f.det:.4f}  Tr[F^-1] = {fisher.scalar_bound(f.matrix):.4f}")
