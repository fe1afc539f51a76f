"""Classical and quantum Fisher information matrices and scalar bounds.

Derivatives are central finite differences in the natural parameter units.
The weight matrix of the scalar bound is fixed to the identity, so the
figure of merit is ``Tr[F^{-1}]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import protocol
from .protocol import TrajectoryDistribution

DEFAULT_DELTA = 1e-5
PROB_FLOOR = 1e-12
RANK_RTOL = 1e-10
DET_TOL = 1e-9


class SingularFisherError(ArithmeticError):
    """``Tr[F^{-1}]`` was requested for a rank-deficient matrix."""

    def __init__(self, report: SingularityReport):
        super().__init__(f"Fisher matrix is singular (rank {report.rank} < k = {report.k})")
        self.report = report


class StepSizeError(ValueError):
    pass


@dataclass(frozen=True)
class FisherMatrix:
    """Symmetric PSD ``k x k`` information matrix.

    ``vanishing_outcome_info`` is set when an outcome below the probability
    floor still had a sizeable derivative, i.e. some information was dropped.
    ``fd_step_change`` is ``max|F(delta) - F(delta/2)| / max|F(delta)|`` when
    the step-halving check was run.
    """

    matrix: np.ndarray
    labels: tuple[str, ...] = ()
    vanishing_outcome_info: bool = False
    outcome_count: int | None = None
    fd_step_change: float | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"Fisher matrix must be square, got {m.shape}")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def k(self) -> int:
        return self.matrix.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "labels": list(self.labels),
            "matrix": self.matrix.tolist(),
            "vanishing_outcome_info": self.vanishing_outcome_info,
            "outcome_count": self.outcome_count,
            "fd_step_change": self.fd_step_change,
        }


@dataclass(frozen=True)
class SingularityReport:
    k: int
    rank: int
    eigenvalues: tuple[float, ...]
    determinant: float
    singular: bool
    outcome_count: int | None
    outcome_condition_met: bool | None
    rank_rtol: float = field(default=RANK_RTOL)

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "rank": self.rank,
            "eigenvalues": list(self.eigenvalues),
            "determinant": self.determinant,
            "singular": self.singular,
            "outcome_count": self.outcome_count,
            "outcome_condition_met": self.outcome_condition_met,
            "rank_rtol": self.rank_rtol,
        }


def _as_matrix(f) -> np.ndarray:
    # FisherMatrix and the analytic qubit results both expose ``.matrix``
    return np.asarray(getattr(f, "matrix", f), dtype=float)


def fd_jacobian(prob_fn, values, delta: float = DEFAULT_DELTA) -> np.ndarray:
    """Central-difference Jacobian ``J[i, m] = d p_m / d lambda_i``.

    ``prob_fn`` maps a parameter array to a probability array (or a
    :class:`TrajectoryDistribution`).
    """
    if delta <= 0:
        raise StepSizeError("delta must be positive")
    values = np.asarray(getattr(values, "values", values), dtype=float)

    def probs(x):
        out = prob_fn(x)
        return np.asarray(getattr(out, "probabilities", out), dtype=float)

    rows = []
    for i in range(values.size):
        step = np.zeros_like(values)
        step[i] = delta
        rows.append((probs(values + step) - probs(values - step)) / (2 * delta))
    return np.array(rows)


def cfi_from_distribution(probs, jacobian, prob_floor: float = PROB_FLOOR, labels=()) -> FisherMatrix:
    """``F_ij = sum_m (d_i p_m)(d_j p_m) / p_m`` over outcomes above ``prob_floor``."""
    p = np.asarray(getattr(probs, "probabilities", probs), dtype=float)
    jac = np.atleast_2d(np.asarray(jacobian, dtype=float))
    if jac.shape[1] != p.size:
        raise ValueError(f"jacobian has {jac.shape[1]} outcome columns, distribution has {p.size}")
    keep = p > prob_floor
    lost = bool(np.any(np.abs(jac[:, ~keep]) > np.sqrt(prob_floor)))
    d = jac[:, keep]
    f = (d / p[keep]) @ d.T
    return FisherMatrix(f, tuple(labels), vanishing_outcome_info=lost, outcome_count=p.size)


def model_cfi(model, values, schedule: protocol.ProtocolSchedule, delta: float = DEFAULT_DELTA) -> FisherMatrix:
    """CFI of the trajectory distribution of ``model`` under ``schedule``."""
    values = np.asarray(getattr(values, "values", values), dtype=float)

    def fn(x):
        return protocol.trajectory_distribution(model, x, schedule)

    p = fn(values)
    return cfi_from_distribution(p, fd_jacobian(fn, values, delta), labels=model.labels)


def step_change(coarse: FisherMatrix, fine: FisherMatrix) -> float:
    scale = float(np.max(np.abs(coarse.matrix)))
    diff = float(np.max(np.abs(coarse.matrix - fine.matrix)))
    return diff / scale if scale > 0 else diff


def model_cfi_prefixes(model, values, schedule: protocol.ProtocolSchedule,
                       delta: float = DEFAULT_DELTA, step_check: bool = False) -> list[FisherMatrix]:
    """CFI of every prefix ``schedule[:n]``, n = 1..n_seq, from one set of runs.

    The prefix distributions are marginals of the full one, so the 2k+1
    finite-difference evaluations are shared. With ``step_check`` the CFI is
    recomputed at ``delta / 2`` and the relative change is stored in
    ``fd_step_change``.
    """
    values = np.asarray(getattr(values, "values", values), dtype=float)
    full = {}

    def fn(x):
        key = tuple(x)
        if key not in full:
            full[key] = protocol.trajectory_distribution(model, x, schedule)
        return full[key]

    def at(n, d):
        def prefix_fn(x):
            return fn(x).marginal(n)
        return cfi_from_distribution(prefix_fn(values), fd_jacobian(prefix_fn, values, d), labels=model.labels)

    out = []
    for n in range(1, schedule.n_seq + 1):
        f = at(n, delta)
        if step_check:
            f = replace(f, fd_step_change=step_change(f, at(n, delta / 2)))
        out.append(f)
    return out


def qfi_pure(state_fn, values, delta: float = DEFAULT_DELTA, norm_tol: float = 1e-6) -> FisherMatrix:
    """Pure-state QFI ``4 Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]``.

    ``state_fn`` must be phase-consistent in ``lambda`` (e.g. a fixed vector
    pushed through parameter-dependent unitaries).
    """
    values = np.asarray(getattr(values, "values", values), dtype=float)
    psi = np.asarray(state_fn(values), dtype=complex)
    derivs = []
    for i in range(values.size):
        step = np.zeros_like(values)
        step[i] = delta
        plus = np.asarray(state_fn(values + step), dtype=complex)
        minus = np.asarray(state_fn(values - step), dtype=complex)
        drift = max(abs(np.linalg.norm(plus) - 1), abs(np.linalg.norm(minus) - 1))
        if drift > norm_tol:
            raise StepSizeError(f"differenced states drift from unit norm by {drift:.2e}")
        derivs.append((plus - minus) / (2 * delta))
    d = np.array(derivs)
    overlap = d.conj() @ psi
    q = 4 * np.real(d.conj() @ d.T - np.outer(overlap, overlap.conj()))
    return FisherMatrix(q)


def singularity_report(f, outcome_count: int | None = None, rank_rtol: float = RANK_RTOL) -> SingularityReport:
    m = _as_matrix(f)
    k = m.shape[0]
    ev = np.sort(np.linalg.eigvalsh(0.5 * (m + m.T)))
    top = ev[-1] if ev.size else 0.0
    rank = int(np.sum(ev > rank_rtol * top)) if top > 0 else 0
    if outcome_count is None and isinstance(f, FisherMatrix):
        outcome_count = f.outcome_count
    return SingularityReport(
        k=k,
        rank=rank,
        eigenvalues=tuple(float(e) for e in ev),
        determinant=float(np.prod(ev)),
        singular=rank < k,
        outcome_count=outcome_count,
        outcome_condition_met=None if outcome_count is None else outcome_count >= k + 1,
        rank_rtol=rank_rtol,
    )


def trace_inverse(f, rank_rtol: float = RANK_RTOL) -> float:
    """``Tr[F^{-1}]``; raises :class:`SingularFisherError` for rank-deficient ``F``."""
    report = singularity_report(f, rank_rtol=rank_rtol)
    if report.singular:
        raise SingularFisherError(report)
    return float(np.sum(1.0 / np.array(report.eigenvalues)))


def pseudo_trace_inverse(f, rank_rtol: float = RANK_RTOL) -> float:
    """Trace of the Moore-Penrose pseudoinverse (null directions dropped)."""
    ev = np.linalg.eigvalsh(_as_matrix(f))
    top = ev.max() if ev.size else 0.0
    if top <= 0:
        return 0.0
    kept = ev[ev > rank_rtol * top]
    return float(np.sum(1.0 / kept))


def scalar_bound(f, rank_rtol: float = RANK_RTOL) -> float:
    """``Tr[F^{-1}]`` or ``inf`` when singular."""
    try:
        return trace_inverse(f, rank_rtol)
    except SingularFisherError:
        return float("inf")


def determinant_ordering_check(q, f, tol: float = DET_TOL) -> bool:
    qm, fm = _as_matrix(q), _as_matrix(f)
    if qm.shape != fm.shape:
        raise ValueError("Q and F must have the same dimension")
    return bool(np.linalg.det(qm) >= np.linalg.det(fm) - tol)
