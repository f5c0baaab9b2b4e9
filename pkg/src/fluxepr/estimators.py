"""scikit-learn style wrappers around the spectrum solvers.

The estimators map external flux (one feature, flux quanta) to spectral
quantities, so they drop into pipelines, ``clone`` and ``get_params`` like
any other estimator.  ``fit`` calibrates whatever the measurement pins down
and caches the flux-independent operators.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .epr import EprModel, EprOperators, Nonlinearity, calibrate_resonator_offset
from .fluxonium import DEFAULT_LEVELS, FluxoniumParams, calibrate_EJ_EL, fluxonium_f01
from .labeling import sweep_hamiltonians
from .lumped import LumpedOperators, lumped_parameters


def _flux_column(X):
    """Accept shape (n,) or (n, 1) and return a 1-D float array."""
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected one feature (external flux), got {X.shape[1]}")
        X = X[:, 0]
    return X


class FluxoniumSpectrum(RegressorMixin, BaseEstimator):
    """Qubit frequency of a single fluxonium as a function of external flux.

    ``fit(X, y)`` takes exactly two (flux, f01) samples and solves for
    ``E_J`` and ``E_L`` with ``E_C`` held fixed; the initial guess is the
    constructor's ``E_J`` and ``E_L``.

    Attributes
    ----------
    E_J_, E_L_ : float
        Calibrated energies in GHz.
    """

    def __init__(self, E_C=1.0, E_J=4.0, E_L=1.0, levels=DEFAULT_LEVELS, tol=1e-4, max_iter=200):
        self.E_C = E_C
        self.E_J = E_J
        self.E_L = E_L
        self.levels = levels
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y):
        flux = _flux_column(X)
        y = np.asarray(y, dtype=float).ravel()
        if flux.shape != (2,) or y.shape != (2,):
            raise ValueError("FluxoniumSpectrum.fit needs exactly two (flux, f01) samples")
        self.E_J_, self.E_L_ = calibrate_EJ_EL(
            self.E_C,
            tuple(y),
            (self.E_J, self.E_L),
            flux_points=tuple(flux),
            levels=self.levels,
            tol=self.tol,
            max_iter=self.max_iter,
        )
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, ["E_J_", "E_L_"])
        flux = _flux_column(X)
        return np.array(
            [
                fluxonium_f01(FluxoniumParams(self.E_C, self.E_L_, self.E_J_, f), self.levels)
                for f in flux
            ]
        )


class _SweepEstimator(BaseEstimator):
    """Shared predict/sweep for the two coupled-system estimators."""

    def sweep(self, X):
        """Full :class:`~fluxepr.labeling.FluxSweepResult` at the flux points ``X``."""
        check_is_fitted(self, "operators_")
        flux = _flux_column(X)
        return sweep_hamiltonians(
            self._hamiltonian_at, self.resonator_annihilator_, flux, self.n_eigs, self.n_jobs
        )

    def predict(self, X):
        """``(n_points, 3)`` array of qubit frequency, resonator frequency and chi (GHz)."""
        return self.sweep(X).as_array()


class EprSpectrum(_SweepEstimator):
    """Dressed spectrum of an EPR model versus external flux.

    Parameters
    ----------
    modes, junctions : sequence
        :class:`~fluxepr.epr.ModeSpec` and :class:`~fluxepr.epr.JunctionSpec`.
    nonlinearity : str
        ``"exact"`` or ``"taylor:N"``.
    resonator_offset : float
        Starting resonator offset in GHz.

    ``fit(X, y)`` with measured resonator frequencies ``y`` at fluxes ``X``
    calibrates the resonator offset from the zero-flux sample; ``fit()``
    without data keeps ``resonator_offset``.
    """

    def __init__(
        self,
        modes=(),
        junctions=(),
        nonlinearity="exact",
        resonator_offset=0.0,
        n_eigs=60,
        n_jobs=None,
    ):
        self.modes = modes
        self.junctions = junctions
        self.nonlinearity = nonlinearity
        self.resonator_offset = resonator_offset
        self.n_eigs = n_eigs
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        model = EprModel(self.modes, self.junctions, resonator_offset=self.resonator_offset)
        nonlinearity = Nonlinearity.parse(self.nonlinearity)
        if y is not None:
            flux = _flux_column(X)
            y = np.asarray(y, dtype=float).ravel()
            at_zero = np.flatnonzero(np.isclose(np.mod(flux + 0.5, 1.0) - 0.5, 0.0))
            if at_zero.size == 0:
                raise ValueError("offset calibration needs a zero-flux resonator sample")
            offset = calibrate_resonator_offset(model, y[at_zero[0]], nonlinearity)
            model = model.with_offset(offset)
        self.model_ = model
        self.resonator_offset_ = model.resonator_offset
        self.operators_ = EprOperators(model, nonlinearity)
        self.resonator_annihilator_ = self.operators_.mode_operator(model.mode_roles[1])
        self.n_features_in_ = 1
        return self

    def _hamiltonian_at(self, flux):
        return self.operators_.hamiltonian(external_flux=flux)


class LumpedSpectrum(_SweepEstimator):
    """Dressed spectrum of the lumped fluxonium-resonator Hamiltonian versus flux.

    Energies in GHz; ``omega_r`` is the resonator's linear frequency.
    """

    def __init__(
        self,
        E_C=1.0,
        E_L=1.0,
        E_J=4.0,
        omega_r=7.0,
        g=0.05,
        fluxonium_levels=30,
        resonator_levels=10,
        n_eigs=60,
        n_jobs=None,
    ):
        self.E_C = E_C
        self.E_L = E_L
        self.E_J = E_J
        self.omega_r = omega_r
        self.g = g
        self.fluxonium_levels = fluxonium_levels
        self.resonator_levels = resonator_levels
        self.n_eigs = n_eigs
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        self.params_ = lumped_parameters(self.E_C, self.E_L, self.E_J, self.omega_r, self.g)
        self.operators_ = LumpedOperators(
            self.params_, self.fluxonium_levels, self.resonator_levels
        )
        self.resonator_annihilator_ = self.operators_.resonator_annihilator
        self.n_features_in_ = 1
        return self

    def _hamiltonian_at(self, flux):
        return self.operators_.hamiltonian(flux)
