import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqsense import fisher, models, qcore
from seqsense.models import QubitToy
from seqsense.protocol import MeasurementBasis

angles = st.floats(0.05, np.pi - 0.05)
phis = st.floats(0.05, 2 * np.pi - 0.05)


def test_parameter_vector_contract():
    v = models.ParameterVector((0.1, 0.2), ("a", "b"))
    assert v.k == 2
    assert v.replace([1, 2]).values == (1.0, 2.0)
    with pytest.raises(models.ConfigurationError):
        models.ParameterVector((0.1, 0.2), ("a", "a"))
    with pytest.raises(models.ConfigurationError):
        models.ParameterVector((), ())


def test_two_site_chain_spectrum():
    # sigma.sigma has eigenvalues 1 (triplet) and -3 (singlet)
    m = models.heisenberg(2, j=1.0, k=1)
    w = np.linalg.eigvalsh(m.hamiltonian([0.0]))
    assert np.allclose(w, [-1, -1, -1, 3])


def test_chain_conventions():
    m = models.heisenberg(4, k=2)
    assert m.labels == ("B1", "B2")
    assert m.measured_site == 3
    assert m.default_tau == 4.0
    assert np.allclose(m.initial_state, qcore.basis_state(15, 16))
    assert np.allclose(m.generators[0], qcore.embed_site_operator(qcore.SIGMA_X, 0, (2,) * 4))


def test_chain_k_above_n():
    with pytest.raises(models.ConfigurationError):
        models.heisenberg(3, k=4)


def test_fig1_chain_accepted():
    m = models.heisenberg(10, k=8)
    assert qcore.is_hermitian(m.hamiltonian([0.5] * 8))


@settings(max_examples=20, deadline=None)
@given(vals=st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_chain_hermitian(vals):
    assert qcore.is_hermitian(models.heisenberg(4, k=3).hamiltonian(vals))


def test_jc_excitation_conservation():
    m = models.jaynes_cummings(n_fock=30)
    h = m.hamiltonian([0.9, 1.1, 0.1, 0.2])
    n_exc = models.excitation_number(30)
    assert np.max(np.abs(h @ n_exc - n_exc @ h)) <= 1e-10


def test_jc_fig2_configuration():
    m = models.jaynes_cummings(omega_a=1.0, params=(0.9, 1.1, 0.1, 0.2), n_fock=30, alpha=2.0)
    assert m.subsystem_dims == (2, 2, 30)
    assert m.labels == models.JC_LABELS
    assert np.isclose(m.default_tau, 2 * np.pi)
    assert abs(np.linalg.norm(m.initial_state) - 1) < 1e-12
    assert qcore.is_hermitian(m.hamiltonian([0.9, 1.1, 0.1, 0.2]))


def test_jc_fixed_parameters_frozen():
    full = models.jaynes_cummings()
    part = models.jaynes_cummings(unknown=("omega2", "J2"))
    assert np.allclose(part.hamiltonian([1.1, 0.2]), full.hamiltonian([0.9, 1.1, 0.1, 0.2]))


def test_jc_vacuum_field():
    c = models.coherent_amplitudes(0.0, 5)
    assert np.allclose(c, qcore.basis_state(0, 5))


def test_jc_cutoff_error():
    with pytest.raises(models.CutoffError):
        models.jaynes_cummings(n_fock=8, alpha=2.0)


def test_jc_bad_labels():
    with pytest.raises(models.ConfigurationError):
        models.jaynes_cummings(unknown=("omega3",))
    with pytest.raises(models.ConfigurationError):
        models.jaynes_cummings(measured_atom=2)


def test_coherent_amplitudes_poisson():
    c = models.coherent_amplitudes(2.0, 30)
    n = np.arange(30)
    assert np.isclose(np.sum(n * np.abs(c) ** 2), 4.0, atol=1e-8)


def test_qubit_state_examples():
    assert np.allclose(models.qubit_state(QubitToy(0.0, 0.0, 1.0)), [[1, 0], [0, 0]])
    assert np.allclose(models.qubit_state(QubitToy(1.0, 2.0, 0.0)), np.eye(2) / 2)


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(0, np.pi), phi=st.floats(0, 6.28), p=st.floats(0, 1))
def test_qubit_state_is_density_matrix(theta, phi, p):
    rho = models.qubit_state(QubitToy(theta, phi, p))
    assert np.isclose(np.trace(rho).real, 1)
    assert np.linalg.eigvalsh(rho).min() >= -1e-12


def test_qubit_toy_domain():
    with pytest.raises(models.ConfigurationError):
        QubitToy(4.0, 0.0)
    with pytest.raises(models.ConfigurationError):
        QubitToy(1.0, 0.0, 1.5)


def test_analytic_qfi_examples():
    assert np.allclose(models.analytic_qfi_qubit(QubitToy(0.7, 0.3, 1.0)), np.diag([1, np.sin(0.7) ** 2]))
    assert np.allclose(models.analytic_qfi_qubit(QubitToy(0.7, 0.3, 0.0)), 0)
    assert np.allclose(models.analytic_qfi_qubit(QubitToy(np.pi / 2, 0.3, 0.5)), np.diag([0.25, 0.25]))


def test_analytic_qfi_matches_generic():
    rng = np.random.default_rng(21)
    for theta, phi in zip(rng.uniform(0.05, np.pi - 0.05, 100), rng.uniform(0.05, 6.2, 100)):
        q = fisher.qfi_pure(lambda x: models.qubit_pure_state(*x), [theta, phi]).matrix
        assert np.max(np.abs(q - models.analytic_qfi_qubit(QubitToy(theta, phi)))) <= 1e-8


@settings(max_examples=100, deadline=None)
@given(theta=angles, phi=phis, tp=st.floats(0, np.pi), pp=st.floats(0, 6.28), p=st.sampled_from([1.0, 0.6]))
def test_projective_cfi_singular(theta, phi, tp, pp, p):
    f = models.analytic_cfi_qubit_projective(QubitToy(theta, phi, p), MeasurementBasis(tp, pp))
    assert abs(f.det) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(theta=angles, phi=phis, tp=st.floats(0.05, np.pi - 0.05), pp=st.floats(0, 6.28), p=st.floats(0.1, 1.0))
def test_projective_cfi_matches_generic(theta, phi, tp, pp, p):
    basis = MeasurementBasis(tp, pp)
    ref = models.analytic_cfi_qubit_projective(QubitToy(theta, phi, p), basis).matrix
    prob = lambda x: models.qubit_projective_probabilities(x[0], x[1], p, basis)
    x0 = np.array([theta, phi])
    num = fisher.cfi_from_distribution(prob(x0), fisher.fd_jacobian(prob, x0)).matrix
    scale = max(1.0, np.max(np.abs(ref)))
    assert np.max(np.abs(num - ref)) <= 1e-8 * scale * 100  # FD error O(delta^2) on O(1) entries


def test_projective_components_agree_with_rank_one_form():
    rng = np.random.default_rng(8)
    for _ in range(50):
        t = QubitToy(rng.uniform(0.1, 3.0), rng.uniform(0.1, 6.1), rng.uniform(0.2, 1.0))
        b = MeasurementBasis(rng.uniform(0.1, 3.0), rng.uniform(0.1, 6.1))
        assert np.allclose(models.projective_cfi_components(t, b),
                           models.analytic_cfi_qubit_projective(t, b).matrix, rtol=1e-8, atol=1e-10)


def test_projective_degenerate_when_aligned():
    f = models.analytic_cfi_qubit_projective(QubitToy(0.8, 1.3), MeasurementBasis(0.8, 1.3))
    assert f.degenerate
    p = models.qubit_projective_probabilities(0.8, 1.3, 1.0, MeasurementBasis(0.8, 1.3))
    assert np.isclose(p[0], 1.0)


def test_povm_symmetry_point():
    assert np.isclose(models.analytic_cfi_qubit_povm4(np.pi / 2, np.pi / 2).det, 0.25, atol=1e-8)


def test_povm_xz_plane():
    for theta in (0.3, 1.0, 2.5):
        f = models.analytic_cfi_qubit_povm4(theta, 0.0)
        assert abs(f.det) <= 1e-12 and f.degenerate
        assert abs(models.povm4_determinant(theta, np.pi)) <= 1e-12
        assert models.povm4_determinant(theta, 0.0) == 0.0


@settings(max_examples=100, deadline=None)
@given(theta=angles, phi=phis)
def test_povm_matches_generic(theta, phi):
    ref = models.analytic_cfi_qubit_povm4(theta, phi).matrix
    x0 = np.array([theta, phi])
    num = fisher.cfi_from_distribution(models.povm4_probabilities(*x0),
                                       fisher.fd_jacobian(lambda x: models.povm4_probabilities(*x), x0)).matrix
    assert np.max(np.abs(num - ref)) <= 1e-8


@settings(max_examples=100, deadline=None)
@given(theta=angles, phi=phis)
def test_povm_determinant_formula(theta, phi):
    expected = 1.0 / (4 / np.sin(phi) ** 2 / np.sin(theta) ** 2 - 4 / np.tan(phi) ** 2)
    assert abs(models.analytic_cfi_qubit_povm4(theta, phi).det - expected) <= 1e-8
    assert abs(models.povm4_determinant(theta, phi) - expected) <= 1e-12


def test_povm_probabilities_normalised():
    assert np.isclose(models.povm4_probabilities(1.1, 2.2).sum(), 1.0)
