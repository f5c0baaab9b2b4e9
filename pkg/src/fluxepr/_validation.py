"""Small input-validation helpers shared by the solvers and estimators."""

import math

import numpy as np

from .exceptions import ContractError


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise ContractError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_nonnegative(value, name):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise ContractError(f"{name} must be a non-negative finite number, got {value!r}")
    return value


def check_unit_interval(value, name):
    value = float(value)
    if not (0.0 <= value <= 1.0):
        raise ContractError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise ContractError(f"{name} must be finite, got {value!r}")
    return value


def check_levels(n, name="n_levels", minimum=2):
    if isinstance(n, bool) or int(n) != n:
        raise ContractError(f"{name} must be an integer, got {n!r}")
    n = int(n)
    if n < minimum:
        raise ContractError(f"{name} must be >= {minimum}, got {n}")
    return n


def check_square(matrix, name="matrix"):
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ContractError(f"{name} must be a square 2-D array, got shape {matrix.shape}")
    return matrix


def check_hermitian(matrix, rtol=1e-10, name="matrix"):
    """Return ``matrix`` as a square array, raising if ``max|M - M^H| > rtol * max|M|``."""
    matrix = check_square(matrix, name)
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    defect = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
    if defect > rtol * scale:
        raise ContractError(
            f"{name} is not Hermitian: max|M - M^H| = {defect:.3e} > {rtol:.0e} * {scale:.3e}"
        )
    return matrix


def check_flux_points(flux_points):
    """1-D float array of external flux values (units of the flux quantum)."""
    arr = np.atleast_1d(np.asarray(flux_points, dtype=float))
    if arr.ndim != 1:
        arr = arr.ravel()
    if arr.size == 0:
        raise ContractError("flux_points must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ContractError("flux_points must be finite")
    return arr
