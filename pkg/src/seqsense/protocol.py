"""Sequential local measurements on an evolving probe.

The probe evolves for ``tau_i`` under ``H(lambda)``, one two-level subsystem is
measured projectively, the state collapses onto the observed branch, and the
cycle repeats without resetting. Outcome ``0`` is the projector onto
``|Y1> = cos(t/2)|up> + e^{i p} sin(t/2)|down>`` and outcome ``1`` onto the
orthogonal ``|Y2>``. Trajectories are indexed as integers whose most
significant bit is the first measurement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qcore

PRUNE_TOL = 1e-14


@dataclass(frozen=True)
class MeasurementBasis:
    """Two-outcome projective basis on a qubit, parameterised by Bloch angles."""

    theta_prime: float = 0.0
    phi_prime: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.theta_prime <= np.pi + 1e-12:
            raise qcore.ContractError(f"theta' = {self.theta_prime} outside [0, pi]")
        if not -1e-12 <= self.phi_prime <= 2 * np.pi + 1e-12:
            raise qcore.ContractError(f"phi' = {self.phi_prime} outside [0, 2 pi)")

    @property
    def vectors(self) -> np.ndarray:
        """Rows are ``|Y1>`` and ``|Y2>`` in the ``(|up>, |down>)`` basis."""
        c = np.cos(self.theta_prime / 2)
        s = np.sin(self.theta_prime / 2)
        ph = np.exp(1j * self.phi_prime)
        return np.array([[c, ph * s], [s, -ph * c]], dtype=complex)

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        y = self.vectors
        return np.outer(y[0], y[0].conj()), np.outer(y[1], y[1].conj())


SIGMA_Z_BASIS = MeasurementBasis(0.0, 0.0)


@dataclass(frozen=True)
class ProtocolSchedule:
    """Ordered (duration, basis) steps."""

    taus: tuple[float, ...]
    bases: tuple[MeasurementBasis, ...]

    def __post_init__(self):
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        object.__setattr__(self, "bases", tuple(self.bases))
        if len(self.taus) < 1:
            raise qcore.ContractError("a schedule needs at least one step")
        if len(self.taus) != len(self.bases):
            raise qcore.ContractError("taus and bases must have the same length")
        if any(t <= 0 for t in self.taus):
            raise qcore.ContractError(f"durations must be positive, got {self.taus}")

    @classmethod
    def uniform(cls, tau: float, n_seq: int, basis: MeasurementBasis = SIGMA_Z_BASIS) -> ProtocolSchedule:
        return cls((tau,) * n_seq, (basis,) * n_seq)

    @property
    def n_seq(self) -> int:
        return len(self.taus)

    @property
    def total_time(self) -> float:
        return float(sum(self.taus))

    def prefix(self, n: int) -> ProtocolSchedule:
        return ProtocolSchedule(self.taus[:n], self.bases[:n])

    def to_dict(self) -> dict:
        return {
            "taus": list(self.taus),
            "bases": [[b.theta_prime, b.phi_prime] for b in self.bases],
        }


def bitstring(index: int, n_seq: int) -> str:
    return format(index, f"0{n_seq}b")


@dataclass(frozen=True)
class TrajectoryDistribution:
    n_seq: int
    probabilities: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=float)
        if p.shape != (2 ** self.n_seq,):
            raise qcore.DimensionError(f"expected {2 ** self.n_seq} probabilities, got {p.shape}")
        if np.any(p < -1e-12):
            raise qcore.ContractError("negative trajectory probability")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def marginal(self, n: int) -> TrajectoryDistribution:
        """Distribution of the first ``n`` outcomes."""
        p = self.probabilities.reshape(2 ** n, -1).sum(axis=1)
        return TrajectoryDistribution(n, p)

    def to_json_dict(self) -> dict:
        return {
            "n_seq": self.n_seq,
            "probabilities": {bitstring(i, self.n_seq): float(v) for i, v in enumerate(self.probabilities)},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> TrajectoryDistribution:
        n = int(d["n_seq"])
        p = np.zeros(2 ** n)
        for key, val in d["probabilities"].items():
            p[int(key, 2)] = val
        return cls(n, p)


@dataclass(frozen=True)
class TrajectoryRecord:
    n_seq: int
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.counts, dtype=np.int64)
        if c.shape != (2 ** self.n_seq,):
            raise qcore.DimensionError(f"expected {2 ** self.n_seq} counts, got {c.shape}")
        if np.any(c < 0):
            raise qcore.ContractError("counts must be non-negative")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_json_dict(self) -> dict:
        return {
            "n_seq": self.n_seq,
            "total": self.total,
            "counts": {bitstring(i, self.n_seq): int(v) for i, v in enumerate(self.counts)},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> TrajectoryRecord:
        n = int(d["n_seq"])
        c = np.zeros(2 ** n, dtype=np.int64)
        for key, val in d["counts"].items():
            c[int(key, 2)] = val
        return cls(n, c)


def dumps(obj) -> str:
    return json.dumps(obj.to_json_dict(), indent=2, sort_keys=True)


def measure_branches(states: np.ndarray, probs: np.ndarray, basis_vectors: np.ndarray,
                     left: int, right: int, prune_tol: float = PRUNE_TOL):
    """Split every branch into the two outcomes of a local projective measurement.

    Parameters
    ----------
    states : (..., B, d) complex
        Normalised conditional states of the ``B`` current branches.
    probs : (..., B) float
        Cumulative probability of each branch.
    basis_vectors : (..., 2, 2) complex
        Rows ``|Y1>``, ``|Y2>``. Leading axes broadcast against ``states``.
    left, right : int
        Product of subsystem dimensions before and after the measured qubit.

    Returns
    -------
    new_states : (..., 2B, d)
    new_probs : (..., 2B)
        Child ``2 b + m`` is branch ``b`` followed by outcome ``m``.
    """
    *lead, nb, d = states.shape
    psi = states.reshape(*lead, nb, left, 2, right)
    # amplitude along each basis vector: c[..., b, m, l, r]
    amp = np.einsum("...ms,...blsr->...bmlr", basis_vectors.conj(), psi)
    weight = np.einsum("...bmlr,...bmlr->...bm", amp, amp.conj()).real
    new_probs = probs[..., :, None] * weight
    alive = new_probs >= prune_tol
    norm = np.sqrt(np.where(alive, weight, 1.0))
    amp = amp * (alive / norm)[..., None, None]
    # rebuild |Y_m> (x) residual in place of the measured qubit
    children = np.einsum("...ms,...bmlr->...bmlsr", basis_vectors, amp)
    new_probs = np.where(alive, new_probs, 0.0)
    return children.reshape(*lead, 2 * nb, d), new_probs.reshape(*lead, 2 * nb)


def _site_split(subsystem_dims, site: int) -> tuple[int, int]:
    dims = list(subsystem_dims)
    if dims[site] != 2:
        raise qcore.ContractError(f"measured subsystem {site} has dimension {dims[site]}, expected 2")
    return int(np.prod(dims[:site])), int(np.prod(dims[site + 1:]))


def run_branches(model, values, schedule: ProtocolSchedule, eig=None):
    """Conditional states and probabilities of all ``2**n_seq`` branches."""
    w, v = eig if eig is not None else qcore.eigh_hermitian(model.hamiltonian(values))
    left, right = _site_split(model.subsystem_dims, model.measured_site)
    states = np.asarray(model.initial_state, dtype=complex)[None, :]
    probs = np.ones(1)
    for tau, basis in zip(schedule.taus, schedule.bases):
        states = evolve_rows(states, w, v, tau)
        states, probs = measure_branches(states, probs, basis.vectors, left, right)
    return states, probs


def evolve_rows(states: np.ndarray, w: np.ndarray, v: np.ndarray, tau: float) -> np.ndarray:
    """Apply ``exp(-i H tau)`` to each row of ``states`` through the eigenbasis of ``H``."""
    coeffs = states @ v.conj()
    coeffs *= np.exp(-1j * w * tau)
    return coeffs @ v.T


def trajectory_distribution(model, values, schedule: ProtocolSchedule, eig=None) -> TrajectoryDistribution:
    """Probabilities ``p(xi | lambda)`` of every outcome sequence.

    ``eig`` may carry a precomputed ``(w, v)`` eigensystem of ``H(values)``
    to skip the diagonalisation.
    """
    _, probs = run_branches(model, values, schedule, eig)
    return TrajectoryDistribution(schedule.n_seq, probs)


def sample_record(dist: TrajectoryDistribution, m: int, seed=None, rng: np.random.Generator | None = None) -> TrajectoryRecord:
    """Multinomial draw of ``m`` trajectories from ``dist``."""
    if m < 0:
        raise qcore.ContractError("m must be non-negative")
    if rng is None:
        rng = np.random.default_rng(seed)
    p = dist.probabilities / dist.probabilities.sum()
    return TrajectoryRecord(dist.n_seq, rng.multinomial(m, p))


def joint_record_state(model, values, schedule: ProtocolSchedule) -> np.ndarray:
    """Purification ``sum_xi |xi> (x) P_xi U ... |psi0>`` of the record and probe.

    Measuring the register in its computational basis reproduces the
    trajectory distribution, so the QFI of this pure state bounds the CFI of
    the records.
    """
    states, probs = run_branches(model, values, schedule)
    return (states * np.sqrt(probs)[:, None]).ravel()


def default_schedule(model, n_seq: int, basis: MeasurementBasis = SIGMA_Z_BASIS) -> ProtocolSchedule:
    return ProtocolSchedule.uniform(model.default_tau, n_seq, basis)


def bases_from_angles(angles: Sequence[Sequence[float]]) -> tuple[MeasurementBasis, ...]:
    return tuple(MeasurementBasis(float(t), float(p)) for t, p in angles)
