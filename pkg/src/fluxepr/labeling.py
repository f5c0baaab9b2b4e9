"""Dressed-state labeling, dispersive shift and flux-sweep bookkeeping."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import numkernel as nk
from ._validation import check_flux_points
from .exceptions import ContractError

#: overlaps below this flag a label as ambiguous
AMBIGUITY_THRESHOLD = 0.5


@dataclass
class LabeledSpectrum:
    """Eigenenergies keyed by ``(q, r)`` excitation labels.

    ``indices`` maps each label to its column in the eigensystem and
    ``overlaps`` holds, for every state claimed through the resonator ladder,
    the squared overlap with its ladder target.
    """

    energies: dict
    overlaps: dict
    indices: dict
    ground_energy: float
    warnings: list = field(default_factory=list)

    @property
    def ambiguous(self):
        return bool(self.warnings)


def _ladder_target(a_dag, state, n):
    target = state
    for _ in range(n):
        target = a_dag @ target
    norm = np.linalg.norm(target)
    if norm == 0:
        raise ContractError("ladder target vanished; resonator truncation too small")
    return target / norm


def label_eigenstates(eigensystem, resonator_annihilator, q_max=2, r_max=2):
    """Assign ``(q, r)`` labels to eigenstates by resonator-ladder overlap.

    The ground state is ``(0, 0)``.  For each qubit level ``q`` a base state
    is chosen (the ground state for ``q = 0``, otherwise the lowest unclaimed
    eigenstate) and labeled ``(q, 0)``; then, for ``n = 1 .. r_max - 1``, the
    unclaimed eigenstate with the largest overlap with
    ``(a_r^dagger)^n |q, 0>`` (normalized) becomes ``(q, n)``.  Claims are
    exclusive.  Overlaps under 0.5 are reported in ``warnings``.
    """
    energies, vectors = eigensystem
    energies = np.asarray(energies, dtype=float)
    vectors = np.asarray(vectors)
    n_states = energies.shape[0]
    if vectors.ndim != 2 or vectors.shape[1] != n_states:
        raise ContractError("eigenvector columns must match the number of eigenvalues")
    if q_max < 2 or r_max < 2:
        raise ContractError("q_max and r_max must both be >= 2")
    if q_max * r_max > n_states:
        raise ContractError(f"{q_max}x{r_max} labels need more than {n_states} eigenstates")
    if np.any(np.diff(energies) < 0):
        raise ContractError("eigenvalues must be sorted ascending")
    a_dag = np.asarray(resonator_annihilator).conj().T
    if a_dag.shape[0] != vectors.shape[0]:
        raise ContractError("resonator operator dimension does not match eigenvectors")

    claimed = np.zeros(n_states, dtype=bool)
    indices, overlaps, notes = {}, {}, []
    for q in range(q_max):
        free = np.flatnonzero(~claimed)
        base = 0 if q == 0 else int(free[0])
        if claimed[base]:
            raise AssertionError("base state already claimed")
        claimed[base] = True
        indices[q, 0] = base
        for n in range(1, r_max):
            target = _ladder_target(a_dag, vectors[:, base], n)
            ov = np.abs(vectors.conj().T @ target) ** 2
            ov[claimed] = -1.0
            k = int(np.argmax(ov))
            if claimed[k]:
                raise AssertionError("duplicate claim")
            claimed[k] = True
            indices[q, n] = k
            overlaps[q, n] = float(min(ov[k], 1.0))
            if ov[k] < AMBIGUITY_THRESHOLD:
                notes.append(f"label {(q, n)} overlap {ov[k]:.3f} < {AMBIGUITY_THRESHOLD}")
    labeled = {label: float(energies[k]) for label, k in indices.items()}
    return LabeledSpectrum(
        energies=labeled,
        overlaps=overlaps,
        indices=indices,
        ground_energy=float(energies[0]),
        warnings=notes,
    )


def dispersive_shift(spectrum):
    """``chi = [(E11 - E10) - (E01 - E00)] / 2`` in the units of the spectrum."""
    E = spectrum.energies if isinstance(spectrum, LabeledSpectrum) else spectrum
    missing = [lab for lab in ((0, 0), (0, 1), (1, 0), (1, 1)) if lab not in E]
    if missing:
        raise ContractError(f"dispersive_shift needs labels {missing}")
    return 0.5 * ((E[1, 1] - E[1, 0]) - (E[0, 1] - E[0, 0]))


@dataclass
class FluxSweepResult:
    """Per-flux qubit frequency, dressed resonator frequency and dispersive shift (GHz)."""

    phi_ext: np.ndarray
    f_qubit: np.ndarray
    f_resonator: np.ndarray
    chi: np.ndarray
    warn: np.ndarray
    notes: list = field(default_factory=list)

    def __len__(self):
        return len(self.phi_ext)

    def rows(self):
        for k in range(len(self)):
            yield (
                float(self.phi_ext[k]),
                float(self.f_qubit[k]),
                float(self.f_resonator[k]),
                float(self.chi[k]),
                bool(self.warn[k]),
            )

    def as_array(self):
        """``(n_points, 3)`` array of ``f_qubit, f_resonator, chi``."""
        return np.column_stack([self.f_qubit, self.f_resonator, self.chi])


def summarize(spectrum):
    E = spectrum.energies
    return (
        E[1, 0] - E[0, 0],
        E[0, 1] - E[0, 0],
        dispersive_shift(spectrum),
        spectrum.warnings,
    )


def sweep_hamiltonians(hamiltonian_at, resonator_annihilator, flux_points, n_eigs=60, n_jobs=None):
    """Diagonalize ``hamiltonian_at(flux)`` at every point and label it.

    Points are independent; with ``n_jobs > 1`` they run on a thread pool and
    are gathered back in input order.
    """
    points = check_flux_points(flux_points)

    def one(flux):
        H = hamiltonian_at(float(flux))
        spectrum = label_eigenstates(
            nk.hermitian_eigendecomposition(H, n_eigs), resonator_annihilator
        )
        return summarize(spectrum)

    if n_jobs is not None and n_jobs > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(one, points))
    else:
        results = [one(f) for f in points]
    f_q, f_r, chi, notes = zip(*results)
    return FluxSweepResult(
        phi_ext=points.copy(),
        f_qubit=np.array(f_q),
        f_resonator=np.array(f_r),
        chi=np.array(chi),
        warn=np.array([bool(n) for n in notes]),
        notes=[list(n) for n in notes],
    )
