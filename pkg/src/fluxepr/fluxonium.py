"""Single-mode fluxonium spectra and Josephson/inductive energy calibration.

Two independent solvers are provided: a harmonic-oscillator basis solver
(the production path) and a finite-difference phase-grid solver used as an
oracle.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from . import numkernel as nk
from ._validation import check_finite, check_levels, check_nonnegative, check_positive
from .exceptions import ContractError, ConvergenceError

DEFAULT_LEVELS = 60
DEFAULT_GRID_POINTS = 8001
DEFAULT_PHASE_WINDOW = 12 * math.pi
# the grid ground state must vanish at the window edges to this level
LEAKAGE_TOL = 1e-8
ENERGY_FLOOR = 1e-3


class ParameterClampWarning(UserWarning):
    """A calibration step tried to push an energy below the floor."""


@dataclass(frozen=True)
class FluxoniumParams:
    """Charging, inductive and Josephson energies (GHz) and external flux (flux quanta)."""

    E_C: float
    E_L: float
    E_J: float
    external_flux: float = 0.0

    def __post_init__(self):
        check_positive(self.E_C, "E_C")
        check_positive(self.E_L, "E_L")
        check_nonnegative(self.E_J, "E_J")
        check_finite(self.external_flux, "external_flux")

    @property
    def phi_zpf(self):
        return (2.0 * self.E_C / self.E_L) ** 0.25

    @property
    def n_zpf(self):
        return (self.E_L / (32.0 * self.E_C)) ** 0.25

    @property
    def plasma_frequency(self):
        """``sqrt(8 E_C E_L)``, the level spacing without the junction."""
        return math.sqrt(8.0 * self.E_C * self.E_L)


def fluxonium_operators(params, levels=DEFAULT_LEVELS):
    """Phase and charge operators ``(phi, n)`` in the E_C/E_L oscillator basis."""
    levels = check_levels(levels, "levels")
    a = nk.annihilation(levels)
    phi = params.phi_zpf * (a + a.conj().T)
    n = 1j * params.n_zpf * (a.conj().T - a)
    return phi, n


def _josephson_term(params, exp_phase):
    bias = np.exp(-2j * math.pi * params.external_flux)
    return -0.5 * params.E_J * (exp_phase * bias + exp_phase.conj().T * np.conj(bias))


def build_fluxonium_ho(params, levels=DEFAULT_LEVELS):
    """Fluxonium Hamiltonian (GHz) in the harmonic basis of the E_C/E_L oscillator.

    ``H = 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext)`` with the cosine
    evaluated exactly as a matrix function of the truncated phase operator.
    """
    levels = check_levels(levels, "levels", minimum=4)
    phi, _ = fluxonium_operators(params, levels)
    # 4 E_C n^2 + E_L phi^2 / 2 is diagonal in its own oscillator basis
    linear = np.diag(params.plasma_frequency * (np.arange(levels) + 0.5)).astype(complex)
    return linear + _josephson_term(params, nk.unitary_exp_i(phi))


def fluxonium_eigenvalues(params, levels=DEFAULT_LEVELS, n_eigs=None):
    w, _ = nk.hermitian_eigendecomposition(build_fluxonium_ho(params, levels), n_eigs)
    return w


def fluxonium_f01(params, levels=DEFAULT_LEVELS):
    """Qubit frequency ``E1 - E0`` in GHz."""
    w = fluxonium_eigenvalues(params, levels, n_eigs=2)
    return float(w[1] - w[0])


def fluxonium_spectrum_grid(
    params, grid_points=DEFAULT_GRID_POINTS, phase_window=DEFAULT_PHASE_WINDOW, n_levels=6
):
    """Lowest eigenvalues from a three-point finite-difference phase grid.

    The grid spans ``[-W/2, W/2]`` with ``n^2 -> -d^2/dphi^2`` and hard walls
    at the ends.  Raises :class:`ContractError` when the ground state has
    visible amplitude at the walls.
    """
    grid_points = check_levels(grid_points, "grid_points", minimum=201)
    if phase_window < 8 * math.pi:
        raise ContractError(f"phase_window must be >= 8*pi, got {phase_window}")
    phi = np.linspace(-phase_window / 2, phase_window / 2, grid_points)
    h = phi[1] - phi[0]
    kinetic = 4.0 * params.E_C / h**2
    potential = 0.5 * params.E_L * phi**2 - params.E_J * np.cos(
        phi - 2 * math.pi * params.external_flux
    )
    diag = 2.0 * kinetic + potential
    off = np.full(grid_points - 1, -kinetic)
    w, v = scipy.linalg.eigh_tridiagonal(
        diag, off, select="i", select_range=(0, n_levels - 1)
    )
    ground = np.abs(v[:, 0])
    edge = max(ground[0], ground[-1]) / ground.max()
    if edge > LEAKAGE_TOL:
        raise ContractError(
            f"ground state reaches the window edge (relative amplitude {edge:.2e}); "
            "increase phase_window"
        )
    return w


def calibrate_EJ_EL(
    E_C,
    targets,
    initial_guess,
    flux_points=(0.0, 0.5),
    levels=DEFAULT_LEVELS,
    tol=1e-4,
    max_iter=200,
    fd_step=1e-3,
):
    """Fit ``(E_J, E_L)`` so the qubit frequency hits two targets.

    Broyden's method on the residuals ``f01(flux_k) - target_k``, with the
    Jacobian seeded by central differences.  Parameters are kept above
    ``1e-3`` GHz.

    Parameters
    ----------
    E_C : float
        Charging energy in GHz (held fixed).
    targets : tuple of float
        Measured qubit frequencies (GHz) at ``flux_points``; the default
        points are zero and half flux quantum.
    initial_guess : tuple of float
        Starting ``(E_J, E_L)`` in GHz.

    Returns
    -------
    tuple of float
        ``(E_J, E_L)``.

    Raises
    ------
    ConvergenceError
        Carries the best iterate and its residuals in ``last``/``residual``.
    """
    E_C = check_positive(E_C, "E_C")
    targets = np.array([check_positive(t, "target") for t in targets], dtype=float)
    flux_points = tuple(float(f) for f in flux_points)
    if targets.shape != (2,) or len(flux_points) != 2:
        raise ContractError("calibrate_EJ_EL needs exactly two targets and two flux points")
    if flux_points == (0.0, 0.5) and not targets[0] > targets[1]:
        raise ContractError("the zero-flux target must exceed the half-flux target")
    x = np.array([check_positive(v, "initial guess") for v in initial_guess], dtype=float)

    base = FluxoniumParams(E_C, x[1], x[0])

    def residual(xv):
        p = replace(base, E_J=float(xv[0]), E_L=float(xv[1]))
        return np.array(
            [fluxonium_f01(replace(p, external_flux=f), levels) for f in flux_points]
        ) - targets

    F = residual(x)
    best = (x.copy(), F.copy())
    if np.all(np.abs(F) < tol):
        return float(x[0]), float(x[1])

    J = np.empty((2, 2))
    for k in range(2):
        step = np.zeros(2)
        step[k] = fd_step
        J[:, k] = (residual(x + step) - residual(x - step)) / (2 * fd_step)

    for _ in range(max_iter):
        try:
            dx = -np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        x_new = x + dx
        if np.any(x_new < ENERGY_FLOOR):
            warnings.warn(
                f"calibration step clamped to the {ENERGY_FLOOR} GHz floor",
                ParameterClampWarning,
                stacklevel=2,
            )
            x_new = np.maximum(x_new, ENERGY_FLOOR)
            dx = x_new - x
        F_new = residual(x_new)
        if np.max(np.abs(F_new)) < np.max(np.abs(best[1])):
            best = (x_new.copy(), F_new.copy())
        if np.all(np.abs(F_new) < tol):
            return float(x_new[0]), float(x_new[1])
        denom = dx @ dx
        if denom == 0:
            break
        J += np.outer(F_new - F - J @ dx, dx) / denom
        x, F = x_new, F_new

    raise ConvergenceError(
        f"E_J/E_L calibration did not converge (residuals {best[1]} GHz)",
        last=(float(best[0][0]), float(best[0][1])),
        residual=best[1],
    )
