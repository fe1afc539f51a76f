"""Dense linear-algebra primitives for small Hilbert spaces.

Matrices are plain complex ``numpy`` arrays and state vectors are 1-D complex
arrays. Every helper returns a fresh array and never mutates its inputs.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

#: Largest Hilbert-space dimension any helper will build.
MAX_DIM = 4096

HERMITIAN_RTOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# |up> is index 0 (sigma_z = +1), |down> is index 1.
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()
IDENTITY_2 = np.eye(2, dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)


class DimensionError(ValueError):
    """Raised when an operator would exceed :data:`MAX_DIM` or shapes disagree."""


class ContractError(ValueError):
    """Raised when an input violates a documented precondition."""


def _check_dim(dim: int, cap: int = MAX_DIM) -> None:
    if dim > cap:
        raise DimensionError(f"dimension {dim} exceeds cap {cap}")


def is_hermitian(h: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        return False
    scale = np.max(np.abs(h)) if h.size else 0.0
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= rtol * max(scale, 1e-300))


def kron(a: np.ndarray, b: np.ndarray, cap: int = MAX_DIM) -> np.ndarray:
    """Kronecker product with a dimension cap.

    >>> kron(SIGMA_Z, SIGMA_Z).diagonal().real
    array([ 1., -1., -1.,  1.])
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ContractError("kron operands must be finite")
    _check_dim(a.shape[0] * b.shape[0], cap)
    if a.ndim == 2:
        _check_dim(a.shape[1] * b.shape[1], cap)
    return np.kron(a, b)


def kron_all(ops, cap: int = MAX_DIM) -> np.ndarray:
    return reduce(lambda x, y: kron(x, y, cap), ops)


def embed_site_operator(op: np.ndarray, site: int, subsystem_dims, cap: int = MAX_DIM) -> np.ndarray:
    """Place ``op`` on subsystem ``site`` with identities on all other factors.

    Sites are 0-indexed and ordered left to right in the tensor product.
    """
    dims = [int(d) for d in subsystem_dims]
    if not 0 <= site < len(dims):
        raise IndexError(f"site {site} out of range for {len(dims)} subsystems")
    op = np.asarray(op, dtype=complex)
    if op.shape != (dims[site], dims[site]):
        raise DimensionError(f"operator shape {op.shape} does not match subsystem dim {dims[site]}")
    _check_dim(int(np.prod(dims)), cap)
    left = int(np.prod(dims[:site]))
    right = int(np.prod(dims[site + 1:]))
    return np.kron(np.kron(np.eye(left, dtype=complex), op), np.eye(right, dtype=complex))


def embed_two_site_operator(op: np.ndarray, site: int, subsystem_dims, cap: int = MAX_DIM) -> np.ndarray:
    """Place a two-body ``op`` on the adjacent pair ``(site, site + 1)``."""
    dims = [int(d) for d in subsystem_dims]
    if not 0 <= site < len(dims) - 1:
        raise IndexError(f"pair starting at {site} out of range for {len(dims)} subsystems")
    op = np.asarray(op, dtype=complex)
    pair = dims[site] * dims[site + 1]
    if op.shape != (pair, pair):
        raise DimensionError(f"operator shape {op.shape} does not match pair dim {pair}")
    _check_dim(int(np.prod(dims)), cap)
    left = int(np.prod(dims[:site]))
    right = int(np.prod(dims[site + 2:]))
    return np.kron(np.kron(np.eye(left, dtype=complex), op), np.eye(right, dtype=complex))


def eigh_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition ``h = V diag(w) V^dagger`` after a Hermiticity check."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ContractError("matrix is not Hermitian within tolerance")
    _check_dim(h.shape[0])
    if not np.any(h.imag):
        # real symmetric input: the real solver is several times faster
        return np.linalg.eigh(h.real)
    return np.linalg.eigh(h)


def evolution_from_eig(w: np.ndarray, v: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i H t)`` from a precomputed eigensystem of ``H``."""
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Unitary ``exp(-i h t)`` for Hermitian ``h``.

    Computed through a full eigendecomposition, so the result is unitary up
    to round-off regardless of ``t``.

    Examples
    --------
    >>> u = expm_hermitian(SIGMA_X, np.pi)
    >>> bool(np.allclose(u, -np.eye(2)))
    True
    """
    w, v = eigh_hermitian(h)
    return evolution_from_eig(w, v, t)


def apply(u: np.ndarray, psi: np.ndarray) -> np.ndarray:
    u = np.asarray(u)
    psi = np.asarray(psi)
    if u.ndim != 2 or u.shape[1] != psi.shape[-1]:
        raise DimensionError(f"cannot apply {u.shape} operator to state of dim {psi.shape[-1]}")
    return u @ psi


def normalize(psi: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ContractError("cannot normalize the zero vector")
    return np.asarray(psi, dtype=complex) / norm


def basis_state(index: int, dim: int) -> np.ndarray:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return psi


def product_state(vectors) -> np.ndarray:
    """Tensor product of single-subsystem state vectors."""
    return kron_all([np.asarray(v, dtype=complex) for v in vectors])
