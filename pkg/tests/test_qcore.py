import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqsense import qcore
from seqsense.qcore import SIGMA_X, SIGMA_Z


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_kron_identity():
    assert np.array_equal(qcore.kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_sigma_z():
    assert np.allclose(qcore.kron(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))


def test_kron_bit_flip_both_factors():
    out = qcore.kron(SIGMA_X, SIGMA_X) @ qcore.basis_state(0, 4)
    assert np.allclose(out, qcore.basis_state(3, 4))


def test_kron_dimension_cap():
    with pytest.raises(qcore.DimensionError):
        qcore.kron(np.eye(64), np.eye(128))


def test_kron_rejects_non_finite():
    with pytest.raises(qcore.ContractError):
        qcore.kron(np.array([[np.nan]]), np.eye(2))


def test_expm_zero_generator():
    assert np.allclose(qcore.expm_hermitian(np.zeros((3, 3)), 1.7), np.eye(3))


def test_expm_sigma_x_pi():
    assert np.allclose(qcore.expm_hermitian(SIGMA_X, np.pi), -np.eye(2), atol=1e-12)


def test_expm_rejects_non_hermitian():
    with pytest.raises(qcore.ContractError):
        qcore.expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


def test_group_law():
    rng = np.random.default_rng(11)
    h = random_hermitian(rng, 8)
    u1, u2 = qcore.expm_hermitian(h, 0.3), qcore.expm_hermitian(h, 1.1)
    assert np.max(np.abs(u1 @ u2 - qcore.expm_hermitian(h, 1.4))) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 64), t=st.floats(-50, 50), seed=st.integers(0, 2 ** 32 - 1))
def test_unitarity_and_round_trip(n, t, seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, n)
    u = qcore.expm_hermitian(h, t)
    assert np.max(np.abs(u @ u.conj().T - np.eye(n))) <= 1e-9
    w, v = qcore.eigh_hermitian(h)
    assert np.max(np.abs((v * w) @ v.conj().T - h)) <= 1e-9 * np.max(np.abs(h))


def test_real_symmetric_path_matches_complex():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(6, 6))
    h = (a + a.T).astype(complex)
    w, _ = qcore.eigh_hermitian(h)
    assert np.allclose(w, np.linalg.eigvalsh(h))


def test_embed_first_and_second_site():
    assert np.allclose(qcore.embed_site_operator(SIGMA_Z, 0, [2, 2]), np.kron(SIGMA_Z, np.eye(2)))
    assert np.allclose(qcore.embed_site_operator(SIGMA_Z, 1, [2, 2]), np.kron(np.eye(2), SIGMA_Z))


def test_embed_number_operator_on_fock_factor():
    n_op = np.diag(np.arange(5)).astype(complex)
    big = qcore.embed_site_operator(n_op, 2, [2, 2, 5])
    psi = qcore.product_state([qcore.DOWN, qcore.DOWN, qcore.basis_state(3, 5)])
    assert np.allclose(big @ psi, 3 * psi)


def test_embed_errors():
    with pytest.raises(IndexError):
        qcore.embed_site_operator(SIGMA_Z, 2, [2, 2])
    with pytest.raises(qcore.DimensionError):
        qcore.embed_site_operator(SIGMA_Z, 0, [3, 2])
    with pytest.raises(IndexError):
        qcore.embed_two_site_operator(np.eye(4), 1, [2, 2])


def test_embed_two_site_matches_kron():
    op = np.kron(SIGMA_X, SIGMA_Z)
    expected = np.kron(np.kron(np.eye(2), op), np.eye(2))
    assert np.allclose(qcore.embed_two_site_operator(op, 1, [2, 2, 2, 2]), expected)


def test_apply_examples():
    psi = qcore.normalize(np.array([0.3, 0.4j]))
    assert np.allclose(qcore.apply(np.eye(2), psi), psi)
    assert np.allclose(qcore.apply(SIGMA_X, qcore.UP), qcore.DOWN)
    plus = np.array([1, 1]) / np.sqrt(2)
    out = qcore.apply(qcore.expm_hermitian(SIGMA_Z, np.pi / 2), plus)
    assert np.allclose(out, np.array([np.exp(-1j * np.pi / 2), np.exp(1j * np.pi / 2)]) / np.sqrt(2))


def test_apply_dimension_mismatch():
    with pytest.raises(qcore.DimensionError):
        qcore.apply(np.eye(3), qcore.UP)


def test_apply_preserves_norm():
    rng = np.random.default_rng(5)
    u = qcore.expm_hermitian(random_hermitian(rng, 16), 2.3)
    psi = qcore.normalize(rng.normal(size=16) + 1j * rng.normal(size=16))
    assert abs(np.linalg.norm(qcore.apply(u, psi)) - 1) <= 1e-10


def test_normalize_zero_vector():
    with pytest.raises(qcore.ContractError):
        qcore.normalize(np.zeros(2))


def test_is_hermitian_tolerance():
    h = np.array([[1.0, 1.0], [1.0 + 1e-14, 1.0]])
    assert qcore.is_hermitian(h)
    assert not qcore.is_hermitian(np.array([[1.0, 1.0], [1.1, 1.0]]))
