"""Flux-sweep spectra of superconducting circuits from energy participation ratios and lumped models."""

from .epr import (
    EprModel,
    JunctionSpec,
    ModeSpec,
    Nonlinearity,
    build_hamiltonian,
    calibrate_resonator_offset,
    classify_modes,
    flux_sweep,
    junction_phase_operator,
    taylor_coefficients,
    zpf_from_epr,
)
from .exceptions import ConfigError, ContractError, ConvergenceError
from .fluxonium import (
    FluxoniumParams,
    build_fluxonium_ho,
    calibrate_EJ_EL,
    fluxonium_f01,
    fluxonium_spectrum_grid,
)
from .labeling import FluxSweepResult, LabeledSpectrum, dispersive_shift, label_eigenstates
from .lumped import (
    CapacitanceNetwork,
    LumpedDerived,
    assemble_maxwell,
    build_lumped_hamiltonian,
    derive_lumped_parameters,
    junction_capacitance_from_area,
    linearized_epr_model,
    lumped_flux_sweep,
    reduce_capacitance_network,
    transform_capacitance,
)

__version__ = "0.1.0"
