"""Measurement-basis and timing searches for the sequential protocol.

Every objective is ``Tr[F^{-1}]`` of the trajectory CFI at one operating
point. Singular candidates score ``+inf``. Candidates are visited in
lexicographic order and the first minimiser wins ties.

The searches share prefix work: the 2k+1 finite-difference Hamiltonians are
diagonalised once, and branch states after step ``i`` are reused by every
candidate that agrees on the first ``i`` bases.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fisher, protocol
from .fisher import DEFAULT_DELTA, PROB_FLOOR, RANK_RTOL
from .protocol import MeasurementBasis, ProtocolSchedule

DEFAULT_BUDGET = 10 ** 7


class BudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchSpec:
    samples_per_angle: int = 7
    theta_range: tuple[float, float] = (0.0, np.pi)
    phi_range: tuple[float, float] = (0.0, 2 * np.pi)
    budget: int = DEFAULT_BUDGET
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if self.samples_per_angle < 2:
            raise ValueError("samples_per_angle must be at least 2")

    def bases(self) -> list[MeasurementBasis]:
        """theta' includes both ends of its range; phi' drops the upper end."""
        thetas = np.linspace(*self.theta_range, self.samples_per_angle)
        phis = np.linspace(*self.phi_range, self.samples_per_angle, endpoint=False)
        return [MeasurementBasis(float(t), float(p)) for t in thetas for p in phis]


@dataclass
class SearchResult:
    best_schedule: ProtocolSchedule | None
    best_objective: float
    evaluations: int
    baseline_objective: float | None = None
    landscape: np.ndarray | None = field(default=None, repr=False)
    landscape_axes: tuple | None = field(default=None, repr=False)

    @property
    def finite(self) -> bool:
        return bool(np.isfinite(self.best_objective))

    def to_json_dict(self) -> dict:
        return {
            "best_schedule": None if self.best_schedule is None else self.best_schedule.to_dict(),
            "best_objective": self.best_objective if self.finite else None,
            "finite_optimum": self.finite,
            "evaluations": self.evaluations,
            "baseline_objective": self.baseline_objective,
        }

    def landscape_csv(self, header: str | None = None) -> str:
        """Rows ``tau1, tau2, objective``; infeasible points are written as ``nan``."""
        buf = io.StringIO()
        if header:
            buf.write(header)
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["tau1", "tau2", "objective"])
        t1, t2 = self.landscape_axes
        for i, a in enumerate(t1):
            for j, b in enumerate(t2):
                w.writerow([f"{a:.10g}", f"{b:.10g}", f"{self.landscape[i, j]:.12g}"])
        return buf.getvalue()


class _FDPoints:
    """Eigensystems at ``lambda`` and ``lambda +- delta e_i`` (row 0 is ``lambda``)."""

    def __init__(self, model, values, delta: float):
        values = np.asarray(getattr(values, "values", values), dtype=float)
        pts = [values]
        for i in range(values.size):
            step = np.zeros_like(values)
            step[i] = delta
            pts += [values + step, values - step]
        self.k = values.size
        self.delta = delta
        eigs = [model.eig(x) for x in pts]
        self.w = np.stack([e[0] for e in eigs])
        self.v = np.stack([e[1] for e in eigs]).astype(complex)
        self.left, self.right = protocol._site_split(model.subsystem_dims, model.measured_site)
        self.psi0 = np.asarray(model.initial_state, dtype=complex)

    def initial(self):
        n = len(self.w)
        return np.broadcast_to(self.psi0, (n, 1, self.psi0.size)).copy(), np.ones((n, 1))

    def evolve(self, states: np.ndarray, tau: float) -> np.ndarray:
        """``states[..., P, B, d]`` with point axis ``P`` aligned to the eigensystems."""
        coeffs = np.einsum("...pbd,pde->...pbe", states, self.v.conj())
        coeffs = coeffs * np.exp(-1j * self.w * tau)[:, None, :]
        return np.einsum("...pbe,pde->...pbd", coeffs, self.v)

    def objective(self, probs: np.ndarray, pseudo: bool = False) -> np.ndarray:
        """``Tr[F^{-1}]`` for ``probs[..., P, m]``; ``inf`` (or pseudo-inverse trace) if singular."""
        p0 = probs[..., 0, :]
        jac = (probs[..., 1::2, :] - probs[..., 2::2, :]) / (2 * self.delta)
        keep = p0 > PROB_FLOOR
        inv_p = np.where(keep, 1.0 / np.where(keep, p0, 1.0), 0.0)
        f = np.einsum("...im,...m,...jm->...ij", jac, inv_p, jac)
        ev = np.linalg.eigvalsh(0.5 * (f + np.swapaxes(f, -1, -2)))
        top = ev[..., -1:]
        ok = ev > RANK_RTOL * top
        recip = np.where(ok, 1.0 / np.where(ok, ev, 1.0), 0.0)
        total = recip.sum(axis=-1)
        if pseudo:
            return np.where(top[..., 0] > 0, total, 0.0)
        return np.where(ok.all(axis=-1), total, np.inf)


def _measure(fd: _FDPoints, states, probs, basis_vectors):
    return protocol.measure_branches(states, probs, basis_vectors, fd.left, fd.right)


def schedule_objective(model, values, schedule: ProtocolSchedule, delta: float = DEFAULT_DELTA,
                       pseudo: bool = False) -> float:
    """``Tr[F^{-1}]`` of one schedule, ``inf`` when singular (or pseudo-inverse trace)."""
    f = fisher.model_cfi(model, values, schedule, delta)
    return fisher.pseudo_trace_inverse(f) if pseudo else fisher.scalar_bound(f)


def grid_search_bases(model, values, n_seq: int, spec: SearchSpec = SearchSpec(), tau: float | None = None) -> SearchResult:
    """Exhaustive search over per-step bases drawn from the angle grid of ``spec``."""
    bases = spec.bases()
    nb = len(bases)
    total = nb ** n_seq
    if total > spec.budget:
        raise BudgetError(
            f"{total} candidates exceed the budget of {spec.budget}; "
            "use greedy_search_bases, fewer samples per angle, or raise the budget")
    tau = model.default_tau if tau is None else tau
    fd = _FDPoints(model, values, spec.delta)
    vecs = np.stack([b.vectors for b in bases])
    states, probs = fd.initial()
    states = fd.evolve(states, tau)

    # The last two steps are vectorised over all nb**2 choices; earlier steps are looped.
    inner = min(n_seq, 2)
    outer = n_seq - inner
    best = (np.inf, None)
    for prefix in itertools.product(range(nb), repeat=outer):
        s, p = states, probs
        for idx in prefix:
            s, p = _measure(fd, s, p, vecs[idx])
            s = fd.evolve(s, tau)
        # vectorise over candidate bases for the remaining steps
        for depth in range(inner):
            s = np.broadcast_to(s, (nb,) + s.shape)
            p = np.broadcast_to(p, (nb,) + p.shape)
            bv = vecs.reshape((nb,) + (1,) * (p.ndim - 2) + (2, 2))
            s, p = protocol.measure_branches(s, p, bv, fd.left, fd.right)
            if depth < inner - 1:
                s = fd.evolve(s, tau)
            # move the new candidate axis behind earlier ones for lexicographic order
            s = np.moveaxis(s, 0, depth) if depth else s
            p = np.moveaxis(p, 0, depth) if depth else p
        obj = fd.objective(p).reshape(-1)
        j = int(np.argmin(obj))
        if obj[j] < best[0]:
            tail = np.unravel_index(j, (nb,) * inner)
            best = (float(obj[j]), tuple(prefix) + tuple(int(t) for t in tail))
    baseline = schedule_objective(model, values, ProtocolSchedule.uniform(tau, n_seq), spec.delta)
    if best[1] is None:
        return SearchResult(None, np.inf, total, baseline)
    sched = ProtocolSchedule((tau,) * n_seq, tuple(bases[i] for i in best[1]))
    return SearchResult(sched, best[0], total, baseline)


def greedy_search_bases(model, values, n_seq: int, spec: SearchSpec = SearchSpec(), tau: float | None = None) -> SearchResult:
    """Fix the first basis to sigma_z, then choose each later basis in turn.

    A step is scored by the prefix CFI up to that step, using the
    pseudo-inverse trace while the prefix is still singular.
    """
    if n_seq < 2:
        raise ValueError("greedy search needs n_seq >= 2")
    bases = spec.bases()
    nb = len(bases)
    vecs = np.stack([b.vectors for b in bases])
    tau = model.default_tau if tau is None else tau
    fd = _FDPoints(model, values, spec.delta)
    states, probs = fd.initial()
    chosen = [protocol.SIGMA_Z_BASIS]
    states = fd.evolve(states, tau)
    states, probs = _measure(fd, states, probs, chosen[0].vectors)
    evaluations = 0
    for _ in range(1, n_seq):
        states = fd.evolve(states, tau)
        bv = vecs.reshape(nb, 1, 2, 2)
        s_all, p_all = protocol.measure_branches(
            np.broadcast_to(states, (nb,) + states.shape),
            np.broadcast_to(probs, (nb,) + probs.shape), bv, fd.left, fd.right)
        obj = fd.objective(p_all)
        if not np.any(np.isfinite(obj)):
            obj = fd.objective(p_all, pseudo=True)
        evaluations += nb
        j = int(np.argmin(obj))
        chosen.append(bases[j])
        states, probs = s_all[j], p_all[j]
    sched = ProtocolSchedule((tau,) * n_seq, tuple(chosen))
    final = float(fd.objective(probs))
    baseline = schedule_objective(model, values, ProtocolSchedule.uniform(tau, n_seq), spec.delta)
    return SearchResult(sched, final, evaluations, baseline)


def timing_landscape(model, values, total_time: float, points: int = 60, n_seq: int = 3,
                     delta: float = DEFAULT_DELTA) -> SearchResult:
    """``Tr[F^{-1}]`` over first/second intervals with ``tau3 = T - tau1 - tau2``.

    Both intervals are sampled on the interior grid ``T * i / (points + 1)``;
    points with ``tau3 <= 0`` are skipped and stored as ``nan``. All bases
    are sigma_z.
    """
    if n_seq != 3:
        raise ValueError("the timing landscape is defined for n_seq = 3")
    axis = total_time * np.arange(1, points + 1) / (points + 1)
    fd = _FDPoints(model, values, delta)
    z = protocol.SIGMA_Z_BASIS.vectors
    land = np.full((points, points), np.nan)
    s0, p0 = fd.initial()
    best = (np.inf, None)
    evaluations = 0
    for i, t1 in enumerate(axis):
        s1, p1 = _measure(fd, fd.evolve(s0, t1), p0, z)
        for j, t2 in enumerate(axis):
            t3 = total_time - t1 - t2
            if t3 <= 1e-12 * total_time:
                continue
            s2, p2 = _measure(fd, fd.evolve(s1, t2), p1, z)
            _, p3 = _measure(fd, fd.evolve(s2, t3), p2, z)
            val = float(fd.objective(p3))
            land[i, j] = val
            evaluations += 1
            if val < best[0]:
                best = (val, (t1, t2, t3))
    uniform = ProtocolSchedule.uniform(total_time / 3, 3)
    baseline = schedule_objective(model, values, uniform, delta)
    sched = None if best[1] is None else ProtocolSchedule(best[1], (protocol.SIGMA_Z_BASIS,) * 3)
    return SearchResult(sched, best[0], evaluations, baseline, land, (axis, axis))
