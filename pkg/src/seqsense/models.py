"""Probe models and single-qubit closed forms.

Both many-body probes have Hamiltonians that are affine in the unknown
parameters, ``H(lambda) = H0 + sum_i lambda_i G_i``. :class:`ProbeModel`
stores ``H0`` and the generators ``G_i`` so that building ``H`` for a new
parameter point is one weighted sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qcore
from .protocol import MeasurementBasis


class ConfigurationError(ValueError):
    pass


class CutoffError(ValueError):
    """Coherent-state amplitude left outside the Fock truncation is too large."""


@dataclass(frozen=True)
class ParameterVector:
    values: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.values) < 1:
            raise ConfigurationError("at least one parameter is required")
        if len(self.values) != len(self.labels):
            raise ConfigurationError("values and labels differ in length")
        if len(set(self.labels)) != len(self.labels):
            raise ConfigurationError(f"labels must be unique, got {self.labels}")

    @property
    def k(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values)

    def replace(self, values) -> ParameterVector:
        return ParameterVector(tuple(values), self.labels)


@dataclass(frozen=True)
class ProbeModel:
    """A closed quantum probe with one measured qubit.

    Attributes
    ----------
    subsystem_dims : tuple of int
        Tensor-product structure, left to right.
    h0 : ndarray
        Parameter-independent part of the Hamiltonian.
    generators : tuple of ndarray
        ``dH / d lambda_i`` for each unknown parameter, same order as ``labels``.
    labels : tuple of str
    initial_state : ndarray
    measured_site : int
        0-based index into ``subsystem_dims``; must address a qubit.
    default_tau : float
        Per-step evolution time used by default schedules.
    constants : dict
        Fixed physical constants, echoed into reports.
    """

    name: str
    subsystem_dims: tuple[int, ...]
    h0: np.ndarray = field(repr=False)
    generators: tuple[np.ndarray, ...] = field(repr=False)
    labels: tuple[str, ...]
    initial_state: np.ndarray = field(repr=False)
    measured_site: int
    default_tau: float
    constants: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subsystem_dims[self.measured_site] != 2:
            raise ConfigurationError("the measured subsystem must be a qubit")
        if len(self.generators) != len(self.labels):
            raise ConfigurationError("one generator per parameter label is required")

    @property
    def dim(self) -> int:
        return int(np.prod(self.subsystem_dims))

    @property
    def k(self) -> int:
        return len(self.labels)

    def hamiltonian(self, values) -> np.ndarray:
        values = np.asarray(getattr(values, "values", values), dtype=float)
        if values.shape != (self.k,):
            raise ConfigurationError(f"expected {self.k} parameter values, got {values.shape}")
        h = self.h0.copy()
        for lam, g in zip(values, self.generators):
            h += lam * g
        return h

    def eig(self, values):
        return qcore.eigh_hermitian(self.hamiltonian(values))


def heisenberg(n_sites: int, j: float = 1.0, k: int = 1, tau: float | None = None,
               measured_site: int | None = None) -> ProbeModel:
    """Ferromagnetic Heisenberg chain with ``k`` unknown transverse fields.

    ``H = -J sum_j s^j . s^{j+1} + sum_{j<=k} B_j sigma_x^j`` on ``n_sites``
    qubits, starting from all spins down and measuring the last spin. The
    fields sit on the first ``k`` sites. Default step duration is
    ``J tau = N``.
    """
    if n_sites < 2:
        raise ConfigurationError("the chain needs at least two sites")
    if not 1 <= k <= n_sites:
        raise ConfigurationError(f"need 1 <= k <= N, got k={k}, N={n_sites}")
    dims = (2,) * n_sites
    qcore._check_dim(2 ** n_sites)
    h0 = np.zeros((2 ** n_sites,) * 2, dtype=complex)
    exchange = sum(np.kron(s, s) for s in (qcore.SIGMA_X, qcore.SIGMA_Y, qcore.SIGMA_Z))
    for site in range(n_sites - 1):
        h0 -= j * qcore.embed_two_site_operator(exchange, site, dims)
    gens = tuple(qcore.embed_site_operator(qcore.SIGMA_X, site, dims) for site in range(k))
    psi0 = qcore.product_state([qcore.DOWN] * n_sites)
    return ProbeModel(
        name="heisenberg",
        subsystem_dims=dims,
        h0=h0,
        generators=gens,
        labels=tuple(f"B{i + 1}" for i in range(k)),
        initial_state=psi0,
        measured_site=n_sites - 1 if measured_site is None else measured_site,
        default_tau=float(n_sites) / j if tau is None else float(tau),
        constants={"N": n_sites, "J": j},
    )


JC_LABELS = ("omega1", "omega2", "J1", "J2")


def coherent_amplitudes(alpha: complex, n_fock: int, tail_tol: float = 1e-10) -> np.ndarray:
    """Truncated, renormalised Fock amplitudes of ``|alpha>``."""
    n = np.arange(n_fock)
    log_fact = np.array([math.lgamma(i + 1) for i in n])
    mag = abs(alpha)
    if mag == 0:
        c = np.zeros(n_fock, dtype=complex)
        c[0] = 1.0
        return c
    c = np.exp(-mag ** 2 / 2 + n * np.log(mag) - log_fact / 2) * np.exp(1j * np.angle(alpha) * n)
    tail = 1.0 - float(np.sum(np.abs(c) ** 2))
    if tail > tail_tol:
        raise CutoffError(f"coherent state alpha={alpha} loses {tail:.3e} of its norm at n_fock={n_fock}")
    return c / np.linalg.norm(c)


def jaynes_cummings(omega_a: float = 1.0, params=(0.9, 1.1, 0.1, 0.2), unknown=JC_LABELS,
                    n_fock: int = 30, alpha: complex = 2.0, measured_atom: int = 0,
                    tau: float | None = None) -> ProbeModel:
    """Two atoms coupled to one cavity mode in the rotating-wave approximation.

    ``H = w_a a^dag a + sum_j (w_j / 2) sigma_z^j + sum_j J_j (a^dag s-^j + a s+^j)``
    on ``atom1 (x) atom2 (x) field``. ``params`` gives ``(omega1, omega2, J1,
    J2)`` in the same units as ``omega_a``; the labels listed in ``unknown``
    become estimation parameters and the rest are frozen into ``H0``.
    The initial state is ``|down, down, alpha>`` and the default step
    duration is ``omega_a tau = 2 pi``.
    """
    if n_fock < 2:
        raise ConfigurationError("n_fock must be at least 2")
    unknown = tuple(unknown)
    bad = [u for u in unknown if u not in JC_LABELS]
    if bad or not unknown or len(set(unknown)) != len(unknown):
        raise ConfigurationError(f"unknown parameters must be a non-empty subset of {JC_LABELS}, got {unknown}")
    if measured_atom not in (0, 1):
        raise ConfigurationError("measured_atom must be 0 or 1")
    dims = (2, 2, n_fock)
    a = np.diag(np.sqrt(np.arange(1, n_fock)), 1).astype(complex)
    field_num = qcore.embed_site_operator(a.conj().T @ a, 2, dims)
    big_a = qcore.embed_site_operator(a, 2, dims)
    terms = {}
    for atom in (0, 1):
        sz = qcore.embed_site_operator(qcore.SIGMA_Z, atom, dims)
        sp = qcore.embed_site_operator(qcore.SIGMA_PLUS, atom, dims)
        sm = qcore.embed_site_operator(qcore.SIGMA_MINUS, atom, dims)
        terms[f"omega{atom + 1}"] = 0.5 * sz
        terms[f"J{atom + 1}"] = big_a.conj().T @ sm + big_a @ sp
    values = dict(zip(JC_LABELS, (float(x) for x in params)))
    h0 = omega_a * field_num
    for label in JC_LABELS:
        if label not in unknown:
            h0 = h0 + values[label] * terms[label]
    psi0 = qcore.product_state([qcore.DOWN, qcore.DOWN, coherent_amplitudes(alpha, n_fock)])
    return ProbeModel(
        name="jaynes_cummings",
        subsystem_dims=dims,
        h0=h0,
        generators=tuple(terms[u] for u in unknown),
        labels=unknown,
        initial_state=psi0,
        measured_site=measured_atom,
        default_tau=2 * np.pi / omega_a if tau is None else float(tau),
        constants={"omega_a": omega_a, "n_fock": n_fock, "alpha": alpha,
                   **{f"{lab}_fixed": values[lab] for lab in JC_LABELS if lab not in unknown}},
    )


def excitation_number(n_fock: int) -> np.ndarray:
    """``a^dag a + sum_j s+^j s-^j`` on ``2 (x) 2 (x) n_fock``."""
    dims = (2, 2, n_fock)
    n_op = qcore.embed_site_operator(np.diag(np.arange(n_fock)).astype(complex), 2, dims)
    up_proj = qcore.SIGMA_PLUS @ qcore.SIGMA_MINUS
    return n_op + sum(qcore.embed_site_operator(up_proj, atom, dims) for atom in (0, 1))


# --- single-qubit toy model -------------------------------------------------

@dataclass(frozen=True)
class QubitToy:
    theta: float
    phi: float
    mixing_p: float = 1.0

    def __post_init__(self):
        if not 0 <= self.theta <= np.pi:
            raise ConfigurationError("theta must lie in [0, pi]")
        if not 0 <= self.phi < 2 * np.pi:
            raise ConfigurationError("phi must lie in [0, 2 pi)")
        if not 0 <= self.mixing_p <= 1:
            raise ConfigurationError("mixing_p must lie in [0, 1]")


def qubit_pure_state(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)


def qubit_state(t: QubitToy) -> np.ndarray:
    psi = qubit_pure_state(t.theta, t.phi)
    return t.mixing_p * np.outer(psi, psi.conj()) + (1 - t.mixing_p) * np.eye(2) / 2


def analytic_qfi_qubit(t: QubitToy) -> np.ndarray:
    p2 = t.mixing_p ** 2
    return np.diag([p2, p2 * np.sin(t.theta) ** 2])


def qubit_projective_probabilities(theta, phi, p, basis: MeasurementBasis) -> np.ndarray:
    """Outcome probabilities ``Tr[rho |Y_m><Y_m|]``, m = 1, 2."""
    rho = qubit_state(QubitToy(theta, phi % (2 * np.pi), p))
    y = basis.vectors
    return np.real(np.einsum("ms,st,mt->m", y.conj(), rho, y))


@dataclass(frozen=True)
class AnalyticFisher:
    matrix: np.ndarray
    degenerate: bool = False

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


def analytic_cfi_qubit_projective(t: QubitToy, basis: MeasurementBasis) -> AnalyticFisher:
    """Closed-form two-outcome CFI for ``rho(theta, phi, p)``.

    Writing ``r = p (sin t' sin t cos(p' - p) + cos t' cos t)`` for the Bloch
    overlap, the outcome probabilities are ``(1 +- r) / 2`` and

    ``F_ab = (d_a r)(d_b r) / (1 - r^2)``,

    which is the rank-one matrix behind the component formulas. When
    ``|r| = 1`` an outcome is certain; the limiting matrix is zero and the
    result is flagged degenerate.
    """
    if t.mixing_p <= 0:
        raise ConfigurationError("projective CFI needs p > 0")
    th, ph, p = t.theta, t.phi, t.mixing_p
    tp, pp = basis.theta_prime, basis.phi_prime
    cd = np.cos(pp - ph)
    sd = np.sin(pp - ph)
    r = p * (np.sin(tp) * np.sin(th) * cd + np.cos(tp) * np.cos(th))
    dr_theta = p * (np.sin(tp) * np.cos(th) * cd - np.cos(tp) * np.sin(th))
    dr_phi = p * np.sin(tp) * np.sin(th) * sd
    denom = 1.0 - r * r
    if denom <= 1e-15:
        return AnalyticFisher(np.zeros((2, 2)), degenerate=True)
    f_tt = dr_theta ** 2 / denom
    f_pp = dr_phi ** 2 / denom
    f_tp = dr_theta * dr_phi / denom
    return AnalyticFisher(np.array([[f_tt, f_tp], [f_tp, f_pp]]))


def projective_cfi_components(t: QubitToy, basis: MeasurementBasis) -> np.ndarray:
    """Component-wise closed forms in cot/csc notation.

    Undefined where ``sin theta`` or ``sin theta'`` vanishes; used only as a
    cross-check of :func:`analytic_cfi_qubit_projective` at interior points.
    """
    th, ph, p = t.theta, t.phi, t.mixing_p
    tp, pp = basis.theta_prime, basis.phi_prime
    d = pp - ph
    cot, csc = (lambda x: np.cos(x) / np.sin(x)), (lambda x: 1 / np.sin(x))
    r = p * (np.sin(tp) * np.sin(th) * np.cos(d) + np.cos(tp) * np.cos(th))
    f_tt = -p ** 2 * (np.sin(tp) * np.cos(th) * np.cos(d) - np.cos(tp) * np.sin(th)) ** 2 / (r ** 2 - 1)
    den = p ** 2 * (cot(tp) * cot(th) + np.cos(d)) ** 2 - csc(tp) ** 2 * csc(th) ** 2
    f_pp = -p ** 2 * np.sin(d) ** 2 / den
    f_tp = p ** 2 * np.sin(d) * (cot(tp) - cot(th) * np.cos(d)) / den
    return np.array([[f_tt, f_tp], [f_tp, f_pp]])


def povm4_probabilities(theta: float, phi: float) -> np.ndarray:
    """Equal-weight sigma_z / sigma_x four-outcome POVM on the pure qubit."""
    return np.array([
        0.5 * np.cos(theta / 2) ** 2,
        0.5 * np.sin(theta / 2) ** 2,
        0.25 * (1 + np.cos(phi) * np.sin(theta)),
        0.25 * (1 - np.cos(phi) * np.sin(theta)),
    ])


def analytic_cfi_qubit_povm4(theta: float, phi: float) -> AnalyticFisher:
    """Closed-form CFI of the four-outcome POVM; singular on the XZ-plane."""
    s2 = np.cos(phi) ** 2 * np.sin(theta) ** 2
    denom = 2 * (s2 - 1)
    on_xz = abs(np.sin(phi)) < 1e-12 or abs(np.sin(theta)) < 1e-12
    if abs(denom) < 1e-15:
        # |cos phi sin theta| = 1: an x outcome is certain. The limit is
        # direction dependent; this is the one taken along fixed phi.
        return AnalyticFisher(np.array([[1.0, 0.0], [0.0, 0.0]]), degenerate=True)
    f_tt = (-np.cos(phi) ** 2 * np.cos(2 * theta) - 1) / denom
    f_tp = np.sin(phi) * np.cos(phi) * np.sin(theta) * np.cos(theta) / denom
    # 1 / (2 csc^2 phi csc^2 theta - 2 cot^2 phi), written to stay finite on the poles
    f_pp = np.sin(phi) ** 2 * np.sin(theta) ** 2 / (2 - 2 * s2)
    return AnalyticFisher(np.array([[f_tt, f_tp], [f_tp, f_pp]]), degenerate=on_xz)


def povm4_determinant(theta: float, phi: float) -> float:
    """``1 / (4 csc^2 phi csc^2 theta - 4 cot^2 phi)``, zero on the XZ-plane."""
    s_ph, s_th = np.sin(phi), np.sin(theta)
    num = s_ph ** 2 * s_th ** 2
    return float(num / (4 - 4 * np.cos(phi) ** 2 * s_th ** 2)) if num != 0 else 0.0
