"""Lumped-element quantization of a fluxonium capacitively coupled to a resonator.

The circuit has two fluxonium islands (nodes 1, 2) and a resonator node r:

* ``C1``, ``C2``: island to ground
* ``Cq``: between the islands (including the junction capacitance)
* ``Cqr``: island 2 to the resonator
* ``Cr``: resonator to ground

Capacitances are in fF, inductances in nH, impedances in ohm and energies in
GHz (E/h).  Physical constants are the exact SI values shipped by
:mod:`scipy.constants`.
"""

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants

from . import numkernel as nk
from ._validation import check_levels, check_nonnegative, check_positive
from .epr import EprModel, JunctionSpec, ModeSpec
from .exceptions import ContractError
from .fluxonium import FluxoniumParams, fluxonium_operators
from .labeling import sweep_hamiltonians

E_CHARGE = constants.e
PLANCK = constants.h
HBAR = constants.hbar
FLUX_QUANTUM = PLANCK / (2 * E_CHARGE)

FF = 1e-15
NH = 1e-9
GHZ = 1e9

#: junction capacitance per area, fF / um^2
JUNCTION_CAPACITANCE_DENSITY = 50.0

#: maps (phi1, phi2, phi_r) to (phi1 - phi2, phi1 + phi2, phi_r)
COORDINATE_TRANSFORM = np.array([[1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class CapacitanceNetwork:
    C1: float
    C2: float
    Cq: float
    Cqr: float
    Cr: float

    def __post_init__(self):
        for name in ("C1", "C2", "Cr"):
            check_positive(getattr(self, name), name)
        # a vanishing shunt or coupling capacitance is a legitimate limit
        check_nonnegative(self.Cq, "Cq")
        check_nonnegative(self.Cqr, "Cqr")

    def with_junction_capacitance(self, C_J):
        """Network with ``C_J`` (fF) added in parallel to ``Cq``."""
        return replace(self, Cq=self.Cq + C_J)


@dataclass(frozen=True)
class LumpedDerived:
    """Circuit parameters derived from the capacitance network.

    ``C_star``, ``C_coup``, ``C_pad`` in fF; ``E_C``, ``omega_r`` (linear
    frequency), ``g``, ``E_L``, ``E_J`` in GHz; ``Z0`` in ohm; ``L_r``,
    ``L_q`` in nH.
    """

    C_star: float
    C_coup: float
    E_C: float
    omega_r: float
    g: float
    u_corr: float
    Z0: float
    C_pad: float
    L_r: float
    L_q: float
    E_L: float
    E_J: float

    def fluxonium(self, external_flux=0.0):
        return FluxoniumParams(self.E_C, self.E_L, self.E_J, external_flux)


def assemble_maxwell(network):
    """3x3 Maxwell capacitance matrix (fF) in node order (1, 2, r)."""
    n = network
    return np.array(
        [
            [n.C1 + n.Cq, -n.Cq, 0.0],
            [-n.Cq, n.C2 + n.Cq + n.Cqr, -n.Cqr],
            [0.0, -n.Cqr, n.Cr + n.Cqr],
        ]
    )


def transform_capacitance(maxwell):
    """Capacitance matrix in the (phi, phi_sigma, phi_r) coordinates.

    With ``x = M^-1 y`` the kinetic term becomes ``y^T (A^T C A) y / 2`` for
    ``A = M^-1``.
    """
    maxwell = np.asarray(maxwell, dtype=float)
    if maxwell.shape != (3, 3):
        raise ContractError(f"expected a 3x3 matrix, got shape {maxwell.shape}")
    A = np.linalg.inv(COORDINATE_TRANSFORM)
    return A.T @ maxwell @ A


def transformed_capacitance_closed_form(network):
    """The transformed matrix written out entry by entry."""
    n = network
    s = (n.C1 + n.C2 + n.Cqr) / 4
    d = (n.C1 - n.C2 - n.Cqr) / 4
    return np.array(
        [
            [s + n.Cq, d, n.Cqr / 2],
            [d, s, -n.Cqr / 2],
            [n.Cqr / 2, -n.Cqr / 2, n.Cr + n.Cqr],
        ]
    )


def c_star_closed_form(network):
    n = network
    return n.Cq + n.C1 * (n.C2 + n.Cqr) / (n.C1 + n.C2 + n.Cqr)


def c_coup_closed_form(network):
    """Coupling capacitance (fF, signed) from the large-``Cr`` approximation."""
    n = network
    if n.Cqr == 0:
        return math.inf
    C_star = c_star_closed_form(n)
    inv = -n.Cqr / (C_star * (n.Cqr + n.Cr) * (n.C1 + n.C2 + n.Cqr) / n.C1)
    return 1.0 / inv


def reduce_capacitance_network(network):
    """``(C_star, C_coup_closed, C_coup_numeric)`` in fF.

    ``C_coup_numeric`` is ``1 / [C~^-1](0, 2)`` from the exact inverse of the
    transformed matrix; it is ``inf`` when that entry vanishes (no coupling).
    """
    C_t = transform_capacitance(assemble_maxwell(network))
    try:
        inverse = np.linalg.inv(C_t)
    except np.linalg.LinAlgError as exc:
        raise ContractError("transformed capacitance matrix is singular") from exc
    coupling = inverse[0, 2]
    numeric = math.inf if abs(coupling) < 1e-300 else float(1.0 / coupling)
    return c_star_closed_form(network), c_coup_closed_form(network), numeric


def junction_capacitance_from_area(area):
    """Junction capacitance (fF) for a junction of ``area`` um^2."""
    return JUNCTION_CAPACITANCE_DENSITY * check_positive(area, "area")


def charging_energy(C_star):
    """``E_C = e^2 / (2 C)`` in GHz for ``C`` in fF."""
    return E_CHARGE**2 / (2 * check_positive(C_star, "C_star") * FF * PLANCK) / GHZ


def capacitance_for_charging_energy(E_C):
    """Inverse of :func:`charging_energy`; returns fF."""
    return E_CHARGE**2 / (2 * check_positive(E_C, "E_C") * GHZ * PLANCK) / FF


def inductive_energy(L):
    """``E_L = (Phi0 / 2 pi)^2 / L`` in GHz for ``L`` in nH."""
    return (FLUX_QUANTUM / (2 * math.pi)) ** 2 / (check_positive(L, "L") * NH * PLANCK) / GHZ


def inductance_for_energy(E_L):
    return (FLUX_QUANTUM / (2 * math.pi)) ** 2 / (check_positive(E_L, "E_L") * GHZ * PLANCK) / NH


def derive_lumped_parameters(network, L_r, L_q, Z0, C_pad, E_J):
    """Charging energy, resonator frequency, coupling strength and friends.

    The coupling follows from the ``q q_r / C_coup`` term with the resonator
    treated as a half-wave line of impedance ``Z0``: the island charge sees
    the resonator voltage through the dimensionless ratio
    ``beta = (Cr + Cqr) / C_coup`` and

        g = 2 e beta omega_r sqrt(Z0 / (pi hbar)) u_corr,  u_corr = cos(omega_r C_pad Z0),

    reported as ``g / 2 pi`` in GHz.  ``C_coup`` is taken from the exact
    inverse of the transformed capacitance matrix.
    """
    L_r = check_positive(L_r, "L_r")
    L_q = check_positive(L_q, "L_q")
    Z0 = check_positive(Z0, "Z0")
    E_J = check_positive(E_J, "E_J")
    if C_pad < 0:
        raise ContractError(f"C_pad must be non-negative, got {C_pad}")
    C_star, _, C_coup = reduce_capacitance_network(network)
    C_res = network.Cr + network.Cqr
    omega = 1.0 / math.sqrt(L_r * NH * C_res * FF)
    u_corr = math.cos(omega * C_pad * FF * Z0)
    return LumpedDerived(
        C_star=C_star,
        C_coup=C_coup,
        E_C=charging_energy(C_star),
        omega_r=omega / (2 * math.pi) / GHZ,
        g=coupling_strength(C_coup, C_res, omega / (2 * math.pi) / GHZ, Z0, u_corr),
        u_corr=u_corr,
        Z0=Z0,
        C_pad=float(C_pad),
        L_r=L_r,
        L_q=L_q,
        E_L=inductive_energy(L_q),
        E_J=E_J,
    )


def coupling_strength(C_coup, C_res, omega_r, Z0, u_corr=1.0):
    """Charge coupling ``g / 2 pi`` (GHz) between the island and a half-wave resonator.

    ``C_coup`` and ``C_res`` in fF, ``omega_r`` the linear resonator frequency
    in GHz, ``Z0`` in ohm.  ``g = 2 e beta omega_r sqrt(Z0 / (pi hbar)) u_corr``
    with ``beta = C_res / C_coup``; an infinite ``C_coup`` gives zero.
    """
    beta = C_res / C_coup
    omega = 2 * math.pi * omega_r * GHZ
    g = 2 * E_CHARGE * beta * omega * math.sqrt(Z0 / (math.pi * HBAR)) * u_corr
    return g / (2 * math.pi) / GHZ


def lumped_parameters(E_C, E_L, E_J, omega_r, g):
    """A :class:`LumpedDerived` built straight from energies (GHz)."""
    return LumpedDerived(
        C_star=capacitance_for_charging_energy(E_C),
        C_coup=math.nan,
        E_C=check_positive(E_C, "E_C"),
        omega_r=check_positive(omega_r, "omega_r"),
        g=float(g),
        u_corr=1.0,
        Z0=math.nan,
        C_pad=math.nan,
        L_r=math.nan,
        L_q=inductance_for_energy(E_L),
        E_L=check_positive(E_L, "E_L"),
        E_J=check_nonnegative(E_J, "E_J"),
    )


class LumpedOperators:
    """Flux-independent parts of the coupled lumped Hamiltonian.

    Product basis: fluxonium oscillator levels (slot 0) times resonator Fock
    levels (slot 1).
    """

    def __init__(self, params, fluxonium_levels=30, resonator_levels=10):
        self.params = params
        nf = check_levels(fluxonium_levels, "fluxonium_levels")
        nr = check_levels(resonator_levels, "resonator_levels")
        self.dims = (nf, nr)
        flux_params = params.fluxonium()
        phi, n = fluxonium_operators(flux_params, nf)
        a = nk.annihilation(nr)
        self.resonator_annihilator = nk.embed_operator(a, 1, self.dims)
        linear_f = np.diag(flux_params.plasma_frequency * (np.arange(nf) + 0.5)).astype(complex)
        self.static = (
            nk.embed_operator(linear_f, 0, self.dims)
            + params.omega_r * nk.embed_operator(nk.number(nr), 1, self.dims)
            + 1j * params.g * np.kron(n, a.conj().T - a)
        )
        self.exp_phase = nk.embed_operator(nk.unitary_exp_i(phi), 0, self.dims)

    def hamiltonian(self, external_flux=0.0):
        bias = np.exp(-2j * math.pi * float(external_flux))
        U = self.exp_phase
        return self.static - 0.5 * self.params.E_J * (U * bias + U.conj().T * np.conj(bias))


def build_lumped_hamiltonian(params, external_flux=0.0, fluxonium_levels=30, resonator_levels=10):
    """Coupled fluxonium-resonator Hamiltonian (GHz).

    ``H = 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext) + f_r a^dagger a
    + i g (a^dagger - a) n``.
    """
    return LumpedOperators(params, fluxonium_levels, resonator_levels).hamiltonian(external_flux)


def lumped_flux_sweep(
    params, flux_points, fluxonium_levels=30, resonator_levels=10, n_eigs=60, n_jobs=None
):
    """Same outputs as :func:`fluxepr.epr.flux_sweep`, from the lumped Hamiltonian."""
    ops = LumpedOperators(params, fluxonium_levels, resonator_levels)
    return sweep_hamiltonians(
        ops.hamiltonian, ops.resonator_annihilator, flux_points, n_eigs, n_jobs
    )


def normal_modes(E_C, E_L, E_J, omega_r, g):
    """Linearized normal modes of the coupled circuit at zero flux.

    The junction is replaced by its linear inductance, so the fluxonium
    potential is ``(E_L + E_J) phi^2 / 2``.  Returns ``(frequencies,
    junction_zpfs)`` sorted by frequency, both as arrays (GHz, rad).
    """
    stiffness = E_L + E_J
    potential = np.diag([stiffness, omega_r])
    # coupling i g (a^dagger - a) n = sqrt(2) g P n with P the resonator quadrature
    kinetic = np.array([[8 * E_C, math.sqrt(2) * g], [math.sqrt(2) * g, omega_r]])
    root = np.sqrt(potential)
    w2, vecs = np.linalg.eigh(root @ kinetic @ root)
    freqs = np.sqrt(w2)
    zpfs = np.abs(vecs[0]) * np.sqrt(freqs / (2 * stiffness))
    return freqs, zpfs


def linearized_epr_model(
    E_C, E_L, E_J, omega_r, g, truncation=30, junction="J1", labels=("qubit", "resonator")
):
    """EPR model whose eigenmode data come from linearizing the lumped circuit.

    The participation of the junction in mode m is ``2 E_J phi_mj^2 / f_m``.
    The mode with the larger participation comes first and gets ``labels[0]``.
    """
    freqs, zpfs = normal_modes(E_C, E_L, E_J, omega_r, g)
    p = np.clip(2 * E_J * zpfs**2 / freqs, 0.0, 1.0)
    order = [int(np.argmax(p)), int(np.argmin(p))]
    modes = [
        ModeSpec(labels[k], float(freqs[m]), {junction: float(p[m])}, truncation)
        for k, m in enumerate(order)
    ]
    return EprModel(modes, [JunctionSpec(junction, E_J)])
