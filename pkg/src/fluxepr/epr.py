"""Energy-participation quantization of junction-bearing circuits.

Classical eigenmodes (frequency ``f_m`` and junction participation ``p_mj``)
are turned into a many-mode Hamiltonian in a truncated Fock basis.  The
junction nonlinearity is kept either as the exact cosine (evaluated as a
matrix function of the junction phase operator) or as a truncated Taylor
series.  External flux enters as a phase bias inside the cosine.

Units: energies are E/h in GHz, flux is in units of the flux quantum and
phases are in radians.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Mapping, Optional, Sequence

import numpy as np

from . import numkernel as nk
from ._validation import check_finite, check_levels, check_positive, check_unit_interval
from .exceptions import ContractError, ConvergenceError

DEFAULT_TRUNCATION = 30


class ModeTieWarning(UserWarning):
    """Two modes share the maximal junction participation."""


@dataclass(frozen=True)
class ModeSpec:
    """One classical eigenmode.

    ``frequency`` is the linear frequency in GHz and ``participations`` maps
    junction labels to the energy participation ratio of that junction.
    """

    label: str
    frequency: float
    participations: Mapping[str, float]
    truncation: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        check_positive(self.frequency, f"frequency of mode {self.label!r}")
        for junction, p in self.participations.items():
            check_unit_interval(p, f"participation p[{self.label!r}, {junction!r}]")
        check_levels(self.truncation, f"truncation of mode {self.label!r}")
        object.__setattr__(self, "participations", dict(self.participations))


@dataclass(frozen=True)
class JunctionSpec:
    """A Josephson junction; ``external_flux`` in flux quanta, ``area`` in um^2."""

    label: str
    josephson_energy: float
    external_flux: float = 0.0
    area: Optional[float] = None

    def __post_init__(self):
        check_positive(self.josephson_energy, f"josephson_energy of junction {self.label!r}")
        check_finite(self.external_flux, "external_flux")
        if self.area is not None:
            check_positive(self.area, "area")

    @property
    def external_phase(self):
        return 2.0 * math.pi * self.external_flux


def zpf_from_epr(p_mj, f_m, E_j):
    """Phase zero-point fluctuation of a junction in one mode.

    ``phi_mj**2 = p_mj * f_m / (2 * E_j)`` with both energies in GHz.  The
    non-negative root is returned.
    """
    p_mj = check_unit_interval(p_mj, "p_mj")
    f_m = check_positive(f_m, "f_m")
    E_j = check_positive(E_j, "E_j")
    return math.sqrt(p_mj * f_m / (2.0 * E_j))


def classify_modes(modes, junction):
    """Return ``(qubit_mode, resonator_mode)`` indices for ``junction``.

    The qubit is the mode with the largest participation in the junction; the
    resonator is the mode with the smallest participation among the rest.
    Ties go to the lower index and emit a :class:`ModeTieWarning`.
    """
    if len(modes) < 2:
        raise ContractError("classify_modes needs at least two modes")
    p = []
    for m in modes:
        if junction not in m.participations:
            raise ContractError(f"mode {m.label!r} has no participation entry for {junction!r}")
        p.append(m.participations[junction])
    p = np.asarray(p)
    qubit = int(np.argmax(p))
    if np.count_nonzero(p == p[qubit]) > 1:
        warnings.warn(
            f"participation tie in junction {junction!r}; picking mode {qubit} as qubit",
            ModeTieWarning,
            stacklevel=2,
        )
    rest = [k for k in range(len(modes)) if k != qubit]
    resonator = min(rest, key=lambda k: (p[k], k))
    return qubit, resonator


@dataclass(frozen=True)
class EprModel:
    """Modes, junctions and the derived zero-point fluctuations.

    ``resonator_offset`` (GHz) is added to the bare frequency of the
    resonator mode, which defaults to the classification against the first
    junction and can be pinned with ``resonator_mode``.
    """

    modes: Sequence[ModeSpec]
    junctions: Sequence[JunctionSpec]
    resonator_offset: float = 0.0
    resonator_mode: Optional[int] = None
    zpfs: Mapping = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "junctions", tuple(self.junctions))
        if not self.modes:
            raise ContractError("an EprModel needs at least one mode")
        if not self.junctions:
            raise ContractError("an EprModel needs at least one junction")
        labels = [j.label for j in self.junctions]
        if len(set(labels)) != len(labels):
            raise ContractError(f"duplicate junction labels in {labels}")
        check_finite(self.resonator_offset, "resonator_offset")
        if self.resonator_mode is not None and not 0 <= self.resonator_mode < len(self.modes):
            raise ContractError(f"resonator_mode {self.resonator_mode} out of range")
        zpfs = {}
        for m, mode in enumerate(self.modes):
            for j, junction in enumerate(self.junctions):
                p = mode.participations.get(junction.label, 0.0)
                zpfs[m, j] = zpf_from_epr(p, mode.frequency, junction.josephson_energy)
        object.__setattr__(self, "zpfs", zpfs)

    @property
    def dims(self):
        return tuple(m.truncation for m in self.modes)

    @cached_property
    def mode_roles(self):
        """``(qubit_mode, resonator_mode)`` with respect to the first junction."""
        if len(self.modes) < 2:
            return 0, None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ModeTieWarning)
            qubit, resonator = classify_modes(self.modes, self.junctions[0].label)
        if self.resonator_mode is not None:
            resonator = self.resonator_mode
            if qubit == resonator:
                qubit = next(k for k in range(len(self.modes)) if k != resonator)
        return qubit, resonator

    def bare_frequencies(self):
        freqs = np.array([m.frequency for m in self.modes], dtype=float)
        resonator = self.mode_roles[1]
        if resonator is not None:
            freqs[resonator] += self.resonator_offset
        return freqs

    def with_flux(self, external_flux):
        """Copy with every junction biased at ``external_flux``."""
        junctions = [replace(j, external_flux=float(external_flux)) for j in self.junctions]
        return replace(self, junctions=junctions)

    def with_truncation(self, truncation):
        modes = [replace(m, truncation=int(truncation)) for m in self.modes]
        return replace(self, modes=modes)

    def with_offset(self, resonator_offset):
        return replace(self, resonator_offset=float(resonator_offset))


@dataclass(frozen=True)
class Nonlinearity:
    """Treatment of the junction cosine: ``exact`` or ``taylor`` up to ``order``."""

    kind: str = "exact"
    order: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("exact", "taylor"):
            raise ContractError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "taylor":
            if self.order is None or int(self.order) != self.order or self.order < 3:
                raise ContractError(f"taylor order must be an integer >= 3, got {self.order!r}")

    @classmethod
    def parse(cls, spec):
        """Accept ``"exact"``, ``"taylor:N"``, ``("taylor", N)`` or an instance."""
        if isinstance(spec, cls):
            return spec
        if isinstance(spec, tuple):
            return cls(*spec)
        text = str(spec).strip()
        if text == "exact":
            return cls("exact")
        kind, _, order = text.partition(":")
        if kind == "taylor" and order.strip().lstrip("-").isdigit():
            return cls("taylor", int(order))
        raise ContractError(f"cannot parse nonlinearity {spec!r}; use 'exact' or 'taylor:N'")

    def __str__(self):
        return "exact" if self.kind == "exact" else f"taylor:{self.order}"


def _maclaurin_cos_sin(order):
    """Maclaurin coefficients ``d_p`` (cos) and ``s_p`` (sin) for p = 0..order."""
    d = np.zeros(order + 1)
    s = np.zeros(order + 1)
    for p in range(order + 1):
        if p % 2 == 0:
            d[p] = (-1) ** (p // 2) / math.factorial(p)
        else:
            s[p] = (-1) ** ((p - 1) // 2) / math.factorial(p)
    return d, s


def taylor_coefficients(order, external_flux=0.0):
    """Coefficients ``c_p`` (p = 3..order) of ``-cos(phi - phi_ext)`` about ``phi = 0``.

    ``E_j * sum(c_p * phi**p)`` is the truncated nonlinear junction energy.
    """
    if isinstance(order, bool) or int(order) != order or order < 3:
        raise ContractError(f"order must be an integer >= 3, got {order!r}")
    phase = 2.0 * math.pi * check_finite(external_flux, "external_flux")
    d, s = _maclaurin_cos_sin(int(order))
    c = -(math.cos(phase) * d + math.sin(phase) * s)
    return [float(x) for x in c[3:]]


def junction_phase_operator(model, junction, dims=None):
    """``phi_j = sum_m phi_mj (a_m + a_m^dagger)`` in the product Fock space."""
    j = _junction_index(model, junction)
    dims = model.dims if dims is None else tuple(dims)
    if len(dims) != len(model.modes):
        raise ContractError(f"dims {dims} do not match {len(model.modes)} modes")
    total = int(np.prod(dims))
    phi = np.zeros((total, total))
    for m, d in enumerate(dims):
        a = nk.annihilation(d).real
        phi += model.zpfs[m, j] * nk.embed_operator(a + a.T, m, dims)
    return phi


def _junction_index(model, junction):
    if isinstance(junction, int):
        if not 0 <= junction < len(model.junctions):
            raise ContractError(f"junction index {junction} out of range")
        return junction
    for j, spec in enumerate(model.junctions):
        if spec.label == junction:
            return j
    raise ContractError(f"unknown junction {junction!r}")


class EprOperators:
    """Flux-independent pieces of the EPR Hamiltonian, built once.

    Sweeps over external flux or over the resonator offset only recombine
    these cached matrices; nothing here is mutated after construction.
    """

    def __init__(self, model, nonlinearity="exact"):
        self.model = model
        self.nonlinearity = Nonlinearity.parse(nonlinearity)
        self.dims = model.dims
        self.number_diagonals = [
            np.real(np.diag(nk.embed_operator(nk.number(d), m, self.dims)))
            for m, d in enumerate(self.dims)
        ]
        self.phase_ops = [
            junction_phase_operator(model, j, self.dims) for j in range(len(model.junctions))
        ]
        if self.nonlinearity.kind == "exact":
            self._cos_parts = None
            self.exp_phase = [nk.unitary_exp_i(phi) for phi in self.phase_ops]
        else:
            self.exp_phase = None
            self._cos_parts = [self._series(phi) for phi in self.phase_ops]

    def _series(self, phi):
        # truncated cos and sin series of phi, summed once so each flux point
        # only needs a linear combination of the two
        d, s = _maclaurin_cos_sin(self.nonlinearity.order)
        power = np.eye(phi.shape[0])
        cos_sum = np.zeros_like(phi)
        sin_sum = np.zeros_like(phi)
        for p in range(self.nonlinearity.order + 1):
            if p:
                power = power @ phi
            cos_sum += d[p] * power
            sin_sum += s[p] * power
        return cos_sum, sin_sum

    def mode_operator(self, mode_index):
        d = self.dims[mode_index]
        return nk.embed_operator(nk.annihilation(d), mode_index, self.dims)

    def hamiltonian(self, external_flux=None, resonator_offset=None):
        """Assemble ``H`` (GHz). ``None`` arguments fall back to the model's values."""
        model = self.model
        if resonator_offset is not None:
            model = model.with_offset(resonator_offset)
        freqs = model.bare_frequencies()
        diag = sum(f * n for f, n in zip(freqs, self.number_diagonals))
        H = np.diag(diag).astype(complex)
        for j, junction in enumerate(model.junctions):
            flux = junction.external_flux if external_flux is None else external_flux
            phase = 2.0 * math.pi * float(flux)
            E_j = junction.josephson_energy
            phi = self.phase_ops[j]
            if self.exp_phase is not None:
                U = self.exp_phase[j]
                bias = np.exp(-1j * phase)
                H -= 0.5 * E_j * (U * bias + U.conj().T * np.conj(bias))
            else:
                cos_sum, sin_sum = self._cos_parts[j]
                H -= E_j * (math.cos(phase) * cos_sum + math.sin(phase) * sin_sum)
            H -= 0.5 * E_j * (phi @ phi)
        return H


def build_hamiltonian(model, nonlinearity="exact"):
    """Full EPR Hamiltonian in GHz at the junctions' own external flux.

    The linear part is ``sum_m (f_m + offset_m) a_m^dagger a_m``.  The junction
    term is ``-E_j [cos(phi_j - phi_ext) + phi_j**2 / 2]``, either exactly or
    through its Taylor series up to the requested order (all orders 0..N are
    kept so both treatments share the same limit).  Constant offsets are not
    removed.
    """
    return EprOperators(model, nonlinearity).hamiltonian()


def participation_from_operators(model, mode_index, junction=0):
    """Re-derive ``p_mj`` from the constructed phase operator.

    Returns the single-excitation inductive energy stored in the junction,
    ``E_j phi_j**2 / 2`` measured from the vacuum, divided by ``f_m / 2``.
    """
    j = _junction_index(model, junction)
    dims = model.dims
    phi = junction_phase_operator(model, j, dims)
    energy = 0.5 * model.junctions[j].josephson_energy * (phi @ phi)
    vacuum = np.zeros(int(np.prod(dims)))
    vacuum[0] = 1.0
    excited = nk.embed_operator(nk.creation(dims[mode_index]), mode_index, dims) @ vacuum
    e1 = np.real(np.vdot(excited, energy @ excited))
    e0 = np.real(vacuum @ energy @ vacuum)
    return (e1 - e0) / (0.5 * model.modes[mode_index].frequency)


def flux_sweep(model, flux_points, nonlinearity="exact", n_eigs=60, n_jobs=None):
    """Qubit frequency, dressed resonator frequency and dispersive shift vs flux.

    Parameters
    ----------
    model : EprModel
        Two-mode model; roles come from :attr:`EprModel.mode_roles`.
    flux_points : array_like
        External flux values in flux quanta, applied to every junction.
    nonlinearity : str or Nonlinearity
        ``"exact"`` or ``"taylor:N"``.
    n_eigs : int or None
        Number of lowest eigenpairs used for labeling (``None`` = all).
    n_jobs : int or None
        Worker threads; results do not depend on it.

    Returns
    -------
    FluxSweepResult
    """
    from .labeling import sweep_hamiltonians

    ops = EprOperators(model, nonlinearity)
    resonator = model.mode_roles[1]
    if resonator is None:
        raise ContractError("flux_sweep needs a resonator mode (two or more modes)")
    a_r = ops.mode_operator(resonator)
    return sweep_hamiltonians(
        lambda flux: ops.hamiltonian(external_flux=flux), a_r, flux_points, n_eigs, n_jobs
    )


def dressed_resonator_frequency(ops, resonator_offset, external_flux=0.0, n_eigs=60):
    from .labeling import label_eigenstates

    a_r = ops.mode_operator(ops.model.mode_roles[1])
    H = ops.hamiltonian(external_flux=external_flux, resonator_offset=resonator_offset)
    spectrum = label_eigenstates(nk.hermitian_eigendecomposition(H, n_eigs), a_r)
    return spectrum.energies[0, 1] - spectrum.energies[0, 0]


def calibrate_resonator_offset(
    model, measured_resonator, nonlinearity="exact", tol=1e-6, max_iter=50, n_eigs=60
):
    """Resonator offset (GHz) making the dressed zero-flux resonator match a measurement.

    Secant iteration on the offset, starting from the model's current value.
    Raises :class:`ConvergenceError` (with the last two iterates) if the
    residual is not below ``tol`` within ``max_iter`` evaluations.
    """
    measured_resonator = check_positive(measured_resonator, "measured_resonator")
    ops = EprOperators(model, nonlinearity)

    def residual(offset):
        return dressed_resonator_frequency(ops, offset, 0.0, n_eigs) - measured_resonator

    x0 = float(model.resonator_offset)
    r0 = residual(x0)
    if abs(r0) < tol:
        return x0
    # the dressed resonator moves nearly one-for-one with its bare frequency
    x1 = x0 - r0
    r1 = residual(x1)
    for _ in range(max_iter):
        if abs(r1) < tol:
            return x1
        if r1 == r0:
            break
        x0, x1, r0 = x1, x1 - r1 * (x1 - x0) / (r1 - r0), r1
        r1 = residual(x1)
    if abs(r1) < tol:
        return x1
    raise ConvergenceError(
        f"resonator offset did not converge in {max_iter} iterations (residual {r1:.3e} GHz)",
        last=(x0, x1),
        residual=r1,
    )
