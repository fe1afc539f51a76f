"""Fast self-checks shared by ``seqsense verify`` and the qubit-checks task.

Each check returns a :class:`CheckResult`. Random points come from a
generator seeded by the caller, so reports are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fisher, models, optimize, protocol
from .fisher import RANK_RTOL
from .models import QubitToy
from .protocol import MeasurementBasis, ProtocolSchedule

# interior margin keeping random angles away from coordinate singularities
_EDGE = 0.05


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"

    def to_json_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail, **self.data}


def _interior(rng, n):
    theta = rng.uniform(_EDGE, np.pi - _EDGE, n)
    phi = rng.uniform(_EDGE, 2 * np.pi - _EDGE, n)
    return theta, phi


def qubit_cases(seed: int, n_random: int = 100, n_projective: int = 1000) -> dict:
    """Random parameter sets for the qubit checks."""
    rng = np.random.default_rng([seed, 1])
    th, ph = _interior(rng, n_random)
    rng_p = np.random.default_rng([seed, 2])
    pth, pph = _interior(rng_p, n_projective)
    tp = rng_p.uniform(0, np.pi, n_projective)
    pp = rng_p.uniform(0, 2 * np.pi, n_projective)
    p = 1.0 - rng_p.uniform(0, 1, n_projective)  # in (0, 1]
    rng_v = np.random.default_rng([seed, 3])
    vth, vph = _interior(rng_v, n_random)
    # avoid the XZ-plane band where the closed form is ill-conditioned
    vph = np.where(np.abs(np.sin(vph)) < 0.05, vph + 0.1, vph)
    return {"qfi": (th, ph), "projective": (pth, pph, p, tp, pp), "povm": (vth, vph)}


def check_qfi(cases, tol: float = 1e-7) -> tuple[CheckResult, list]:
    th, ph = cases["qfi"]
    worst = 0.0
    pairs = []
    for a, b in zip(th, ph):
        q = fisher.qfi_pure(lambda x: models.qubit_pure_state(*x), [a, b]).matrix
        worst = max(worst, float(np.max(np.abs(q - np.diag([1.0, np.sin(a) ** 2])))))
        f = models.analytic_cfi_qubit_projective(QubitToy(a, b), protocol.SIGMA_Z_BASIS)
        pairs.append((q, f.matrix))
    ok = worst <= tol
    return CheckResult("qubit QFI = diag(1, sin^2 theta)", ok,
                       f"max deviation {worst:.2e} over {len(th)} points (tol {tol:g})",
                       {"max_deviation": worst}), pairs


def check_projective(cases, tol: float = 1e-10, rank_rtol: float = RANK_RTOL) -> tuple[CheckResult, list]:
    worst = 0.0
    flagged = 0
    pairs = []
    for a, b, p, tp, pp in zip(*cases["projective"]):
        toy = QubitToy(a, b, p)
        f = models.analytic_cfi_qubit_projective(toy, MeasurementBasis(tp, pp))
        worst = max(worst, f.det)
        flagged += fisher.singularity_report(f.matrix, rank_rtol=rank_rtol).singular
        pairs.append((models.analytic_qfi_qubit(toy), f.matrix))
    n = len(cases["projective"][0])
    ok = worst <= tol and flagged == n
    return CheckResult("two-outcome projective CFI is singular", ok,
                       f"max det {worst:.2e} (tol {tol:g}); flagged singular {flagged}/{n}",
                       {"max_det": worst, "flagged_singular": flagged, "cases": n}), pairs


def check_projective_fd(cases, rtol: float = 1e-5) -> CheckResult:
    """Closed-form projective CFI against generic finite differences."""
    worst = 0.0
    for a, b, p, tp, pp in list(zip(*cases["projective"]))[:100]:
        basis = MeasurementBasis(tp, pp)
        probs = lambda x: models.qubit_projective_probabilities(x[0], x[1], p, basis)
        x0 = np.array([a, b])
        num = fisher.cfi_from_distribution(probs(x0), fisher.fd_jacobian(probs, x0)).matrix
        ref = models.analytic_cfi_qubit_projective(QubitToy(a, b, p), basis).matrix
        worst = max(worst, float(np.max(np.abs(num - ref)) / max(1.0, np.max(np.abs(ref)))))
    return CheckResult("projective CFI closed form matches finite differences", worst <= rtol,
                       f"max scaled deviation {worst:.2e} (tol {rtol:g})", {"max_deviation": worst})


def check_povm(cases, tol: float = 1e-8, rank_rtol: float = RANK_RTOL) -> tuple[CheckResult, list]:
    worst = 0.0
    nonsingular = 0
    pairs = []
    for a, b in zip(*cases["povm"]):
        f = models.analytic_cfi_qubit_povm4(a, b)
        expected = 1.0 / (4 / np.sin(b) ** 2 / np.sin(a) ** 2 - 4 / np.tan(b) ** 2)
        worst = max(worst, abs(f.det - expected))
        nonsingular += not fisher.singularity_report(f.matrix, rank_rtol=rank_rtol).singular
        pairs.append((np.diag([1.0, np.sin(a) ** 2]), f.matrix))
    xz = [models.analytic_cfi_qubit_povm4(a, b).det for a in np.linspace(0.1, 3.0, 7) for b in (0.0, np.pi)]
    xz_max = float(np.max(np.abs(xz)))
    for a in np.linspace(0.1, 3.0, 7):
        for b in (0.0, np.pi):
            pairs.append((np.diag([1.0, np.sin(a) ** 2]), models.analytic_cfi_qubit_povm4(a, b).matrix))
    n = len(cases["povm"][0])
    ok = worst <= tol and xz_max <= tol and nonsingular == n
    return CheckResult("four-outcome POVM determinant", ok,
                       f"max deviation {worst:.2e}, XZ-plane max |det| {xz_max:.2e} (tol {tol:g}); "
                       f"non-singular {nonsingular}/{n}",
                       {"max_deviation": worst, "xz_plane_max_det": xz_max, "flagged_nonsingular": nonsingular}), pairs


def check_determinant_ordering(pairs, tol: float = fisher.DET_TOL) -> CheckResult:
    bad = sum(not fisher.determinant_ordering_check(q, f, tol) for q, f in pairs)
    return CheckResult("det Q >= det F", bad == 0, f"{len(pairs) - bad}/{len(pairs)} cases hold (tol {tol:g})",
                       {"violations": bad, "cases": len(pairs)})


def check_normalization(seed: int, tol: float = 1e-10) -> CheckResult:
    rng = np.random.default_rng([seed, 4])
    cases = [
        (models.heisenberg(4, k=2), rng.uniform(0, 1, 2)),
        (models.jaynes_cummings(unknown=("omega1", "J1")), np.array([0.9, 0.1]) + rng.uniform(-0.05, 0.05, 2)),
    ]
    worst = 0.0
    for model, values in cases:
        bases = protocol.bases_from_angles(np.column_stack([rng.uniform(0, np.pi, 3), rng.uniform(0, 2 * np.pi, 3)]))
        sched = ProtocolSchedule((model.default_tau,) * 3, bases)
        p = protocol.trajectory_distribution(model, values, sched).probabilities
        worst = max(worst, abs(p.sum() - 1.0))
    return CheckResult("trajectory distributions sum to 1", worst <= tol,
                       f"max |sum - 1| {worst:.2e} (tol {tol:g})", {"max_deviation": worst})


def reference_two_site(b: float, j: float, tau: float) -> np.ndarray:
    """Straight-line N=2 chain with one field: ``p(up), p(down)`` of site 2 after one step."""
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2)
    h = -j * (np.kron(sx, sx) + np.kron(sy, sy) + np.kron(sz, sz)) + b * np.kron(sx, eye)
    w, v = np.linalg.eigh(h)
    psi = v @ (np.exp(-1j * w * tau) * (v.conj().T @ np.array([0, 0, 0, 1.0])))
    p_up = abs(psi[0]) ** 2 + abs(psi[2]) ** 2
    return np.array([p_up, 1 - p_up])


def check_engine_oracle(tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    model = models.heisenberg(2, k=1)
    for b in (0.1, 0.37, 0.9):
        p = protocol.trajectory_distribution(model, [b], ProtocolSchedule.uniform(model.default_tau, 1)).probabilities
        worst = max(worst, float(np.max(np.abs(p - reference_two_site(b, 1.0, model.default_tau)))))
    return CheckResult("N=2 engine matches 4x4 reference", worst <= tol,
                       f"max deviation {worst:.2e} (tol {tol:g})", {"max_deviation": worst})


def check_timing_baseline(expected: float = 1.52, rtol: float = 0.02) -> CheckResult:
    model = models.heisenberg(4, k=2, tau=4.0)
    value = optimize.schedule_objective(model, [0.5, 0.5], ProtocolSchedule.uniform(4.0, 3))
    ok = abs(value - expected) <= rtol * expected
    return CheckResult("N=4 uniform-timing objective", ok,
                       f"Tr[F^-1] = {value:.6f}, expected {expected} +- {rtol:.0%}", {"value": value})


def qubit_checks(seed: int, n_random: int = 100, n_projective: int = 1000,
                 rank_rtol: float = RANK_RTOL) -> list[CheckResult]:
    cases = qubit_cases(seed, n_random, n_projective)
    qfi, p1 = check_qfi(cases)
    proj, p2 = check_projective(cases, rank_rtol=rank_rtol)
    povm, p3 = check_povm(cases, rank_rtol=rank_rtol)
    return [qfi, proj, check_projective_fd(cases), povm, check_determinant_ordering(p1 + p2 + p3)]


def verify_all(seed: int = 0, rank_rtol: float = RANK_RTOL) -> list[CheckResult]:
    """The fast release gate."""
    return qubit_checks(seed, rank_rtol=rank_rtol) + [
        check_normalization(seed),
        check_engine_oracle(),
        check_timing_baseline(),
    ]
