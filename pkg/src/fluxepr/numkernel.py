"""Truncated bosonic operators and dense Hermitian linear algebra.

Composite operators use the convention that mode 0 is the leftmost
(slowest-varying) Kronecker factor.
"""

from functools import reduce

import numpy as np
import scipy.linalg

from ._validation import check_hermitian, check_levels
from .exceptions import ContractError

# relative hermiticity tolerance for inputs to the eigensolver / matrix functions
HERMITIAN_RTOL = 1e-10


def annihilation(n_levels):
    """Annihilation operator truncated to ``n_levels`` Fock states.

    ``A[n-1, n] = sqrt(n)`` for ``1 <= n < n_levels``.
    """
    n_levels = check_levels(n_levels)
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), k=1).astype(complex)


def creation(n_levels):
    return annihilation(n_levels).conj().T


def number(n_levels):
    return np.diag(np.arange(n_levels, dtype=float)).astype(complex)


def embed_operator(op, mode_index, dims):
    """Place a single-mode operator into the tensor product space.

    Parameters
    ----------
    op : array_like, shape (d, d)
        Operator acting on mode ``mode_index``; ``d`` must equal ``dims[mode_index]``.
    mode_index : int
        Slot of the operator. Slot 0 is the leftmost Kronecker factor.
    dims : sequence of int
        Truncation of every mode.

    Returns
    -------
    ndarray, shape (prod(dims), prod(dims))
    """
    dims = [check_levels(d, "dims entry") for d in dims]
    op = np.asarray(op)
    if not 0 <= mode_index < len(dims):
        raise ContractError(f"mode_index {mode_index} out of range for {len(dims)} modes")
    if op.shape != (dims[mode_index], dims[mode_index]):
        raise ContractError(
            f"operator shape {op.shape} does not match dims[{mode_index}] = {dims[mode_index]}"
        )
    factors = [op if k == mode_index else np.eye(d) for k, d in enumerate(dims)]
    return reduce(np.kron, factors)


def hermitian_eigendecomposition(H, n_eigs=None):
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.

    If ``n_eigs`` is given only the lowest ``n_eigs`` pairs are computed.
    """
    H = check_hermitian(H, HERMITIAN_RTOL, "H")
    # symmetrize so the solver sees an exactly Hermitian operand
    H = 0.5 * (H + H.conj().T)
    dim = H.shape[0]
    if n_eigs is None or n_eigs >= dim:
        return scipy.linalg.eigh(H)
    if n_eigs < 1:
        raise ContractError(f"n_eigs must be >= 1, got {n_eigs}")
    return scipy.linalg.eigh(H, subset_by_index=[0, int(n_eigs) - 1])


def unitary_exp_i(X):
    """``exp(iX)`` for Hermitian ``X``, evaluated through its eigendecomposition."""
    w, V = hermitian_eigendecomposition(X)
    return (V * np.exp(1j * w)) @ V.conj().T


def commutator(A, B):
    return A @ B - B @ A
