import numpy as np
import pytest

from seqsense import fisher, models, optimize
from seqsense.optimize import SearchSpec
from seqsense.protocol import MeasurementBasis, ProtocolSchedule

VALUES = [0.5, 0.5]


@pytest.fixture(scope="module")
def chain4():
    return models.heisenberg(4, k=2)


def test_angle_grid_endpoints():
    bases = SearchSpec(samples_per_angle=3).bases()
    thetas = sorted({b.theta_prime for b in bases})
    phis = sorted({b.phi_prime for b in bases})
    assert np.allclose(thetas, [0, np.pi / 2, np.pi])
    assert np.allclose(phis, [0, 2 * np.pi / 3, 4 * np.pi / 3])


def test_budget_error(chain4):
    with pytest.raises(optimize.BudgetError, match="greedy"):
        optimize.grid_search_bases(chain4, VALUES, 3, SearchSpec(samples_per_angle=7, budget=1000))


def test_single_step_cannot_lift_singularity(chain4):
    res = optimize.grid_search_bases(chain4, VALUES, 1, SearchSpec(samples_per_angle=5))
    assert not res.finite and res.best_schedule is None and res.evaluations == 25
    assert res.to_json_dict()["best_objective"] is None


def test_collapsed_grid_reproduces_baseline(chain4):
    spec = SearchSpec(samples_per_angle=2, theta_range=(0, 0), phi_range=(0, 0))
    res = optimize.grid_search_bases(chain4, VALUES, 3, spec)
    assert res.best_objective == pytest.approx(res.baseline_objective, rel=1e-9)
    g = optimize.greedy_search_bases(chain4, VALUES, 2, spec)
    assert g.best_objective == pytest.approx(g.baseline_objective, rel=1e-9)


def test_grid_objective_matches_direct(chain4):
    res = optimize.grid_search_bases(chain4, VALUES, 2, SearchSpec(samples_per_angle=4))
    direct = fisher.trace_inverse(fisher.model_cfi(chain4, VALUES, res.best_schedule))
    assert res.best_objective == pytest.approx(direct, rel=1e-8)


def test_grid_is_exhaustive_minimum(chain4):
    spec = SearchSpec(samples_per_angle=3)
    res = optimize.grid_search_bases(chain4, VALUES, 2, spec)
    bases = spec.bases()
    vals = [optimize.schedule_objective(chain4, VALUES, ProtocolSchedule((4.0, 4.0), (a, b)))
            for a in bases for b in bases]
    assert res.best_objective == pytest.approx(min(vals), rel=1e-8)
    # first minimiser in lexicographic order
    first = int(np.argmin(vals))
    assert res.best_schedule.bases == (bases[first // len(bases)], bases[first % len(bases)])


def test_greedy_counts_and_first_step(chain4):
    spec = SearchSpec(samples_per_angle=5)
    res = optimize.greedy_search_bases(chain4, VALUES, 3, spec)
    assert res.evaluations == 2 * 25
    assert res.best_schedule.bases[0] == MeasurementBasis(0.0, 0.0)
    assert res.best_objective <= res.baseline_objective


def test_greedy_needs_two_steps(chain4):
    with pytest.raises(ValueError):
        optimize.greedy_search_bases(chain4, VALUES, 1)


def test_dominance_three_steps(chain4):
    spec = SearchSpec(samples_per_angle=7)
    grid = optimize.grid_search_bases(chain4, VALUES, 3, spec)
    greedy = optimize.greedy_search_bases(chain4, VALUES, 3, spec)
    assert grid.best_objective <= greedy.best_objective <= greedy.baseline_objective


def test_search_is_deterministic(chain4):
    spec = SearchSpec(samples_per_angle=4)
    a = optimize.grid_search_bases(chain4, VALUES, 2, spec)
    b = optimize.grid_search_bases(chain4, VALUES, 2, spec)
    assert a.best_schedule == b.best_schedule and a.best_objective == b.best_objective


def test_timing_landscape_uniform_point(chain4):
    res = optimize.timing_landscape(chain4, VALUES, 12.0, points=2)
    # axis is (4, 8); the (4, 4) cell is the uniform schedule
    direct = fisher.trace_inverse(fisher.model_cfi(chain4, VALUES, ProtocolSchedule.uniform(4.0, 3)))
    assert res.landscape[0, 0] == pytest.approx(direct, rel=1e-10)
    assert res.baseline_objective == pytest.approx(direct, rel=1e-10)
    assert np.isnan(res.landscape[1, 1])  # tau3 = 0 is infeasible


def test_timing_landscape_csv_marks_infeasible(chain4):
    res = optimize.timing_landscape(chain4, VALUES, 12.0, points=3)
    text = res.landscape_csv()
    assert text.splitlines()[0] == "tau1,tau2,objective" and "nan" in text


def test_timing_only_three_steps(chain4):
    with pytest.raises(ValueError):
        optimize.timing_landscape(chain4, VALUES, 12.0, n_seq=2)
