"""Figures of merit for qubit states: polarizations, energies, entropies,
coherence, ergotropy and two-qubit entanglement.

Energies are reported dimensionless, in units of hbar*omega of the qubit in
question (the qubit Hamiltonian is (hbar*omega/2) sigma_z, so the excited
level |0> sits at +1/2 and the ground level |1> at -1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import (
    EQUALITY_ATOL,
    DimensionError,
    clamp_spectrum,
    hermitian_eig,
    kron,
    partial_trace,
    pauli,
    sqrtm_psd,
    validate_density,
)


class Polarization(NamedTuple):
    """Coefficients P in rho = I/2 + px*sx + py*sy + pz*sz; |P| <= 1/2."""

    px: float
    py: float
    pz: float

    def norm(self) -> float:
        return math.sqrt(self.px**2 + self.py**2 + self.pz**2)


@dataclass(frozen=True)
class ErgotropyReport:
    """Unitarily extractable work and its incoherent/coherent split."""

    total: float
    incoherent: float
    coherent: float
    passive_state: np.ndarray


@dataclass(frozen=True)
class CorrelatorSet:
    """Single-spin expectations <sigma^j> and same-axis pair correlators
    <sigma_M^j sigma_B^j> for j in (x, y, z)."""

    medium: tuple[float, float, float]
    battery: tuple[float, float, float]
    joint: tuple[float, float, float]


_SIGMA = {axis: pauli(axis) for axis in ("x", "y", "z")}


def _expect(rho: np.ndarray, op: np.ndarray) -> float:
    return float(np.real(np.trace(rho @ op)))


def polarization_vector(rho: np.ndarray) -> Polarization:
    """Invert rho = I/2 + P.sigma: p_j = Tr[rho sigma_j] / 2."""
    rho = validate_density(rho, check_spectrum=False)
    return Polarization(*(0.5 * _expect(rho, _SIGMA[j]) for j in ("x", "y", "z")))


def mean_energy(rho: np.ndarray) -> float:
    """Tr[rho sigma_z]/2: the mean energy in units of hbar*omega."""
    return 0.5 * _expect(validate_density(rho, check_spectrum=False), _SIGMA["z"])


def _entropy_of(probs: np.ndarray) -> float:
    w = clamp_spectrum(np.asarray(probs, dtype=float))
    return float(-sum(p * math.log(p) for p in w if p > 0.0))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr[rho ln rho] in nats, with 0 ln 0 = 0."""
    rho = validate_density(rho, check_spectrum=False)
    return _entropy_of(hermitian_eig(rho).eigenvalues)


def relative_entropy_of_coherence(rho: np.ndarray) -> float:
    """S(diag(rho)) - S(rho): energy-basis coherence in nats, always >= 0."""
    rho = validate_density(rho, check_spectrum=False)
    s_diag = _entropy_of(np.real(np.diag(rho)))
    return s_diag - von_neumann_entropy(rho)


def dephase(rho: np.ndarray) -> np.ndarray:
    """Full sigma_z-basis dephasing: keep the diagonal, drop all coherences."""
    rho = validate_density(rho, check_spectrum=False)
    return np.diag(np.diag(rho)).astype(complex)


def passive_state(rho: np.ndarray) -> np.ndarray:
    """The zero-ergotropy state with the same spectrum as rho.

    For a qubit with Hamiltonian (hbar*omega/2) sigma_z the passive state is
    diagonal with the larger eigenvalue on the ground level |1>.
    """
    rho = validate_density(rho, check_spectrum=False)
    w = clamp_spectrum(hermitian_eig(rho).eigenvalues)  # ascending
    return np.diag([w[0], w[1]]).astype(complex)


def ergotropy(rho: np.ndarray) -> ErgotropyReport:
    """Maximum unitarily extractable work, split into incoherent and coherent parts.

    total      = Tr[(rho - passive(rho)) H] with H = sigma_z/2 (hbar*omega units)
    incoherent = ergotropy of the sigma_z-dephased state
    coherent   = total - incoherent

    The dephasing construction guarantees coherent >= 0 for qubits.
    """
    rho = validate_density(rho, check_spectrum=False)
    tilde = passive_state(rho)
    total = mean_energy(rho) - mean_energy(tilde)
    dephased = dephase(rho)
    incoherent = mean_energy(dephased) - mean_energy(passive_state(dephased))
    return ErgotropyReport(
        total=total,
        incoherent=incoherent,
        coherent=total - incoherent,
        passive_state=tilde,
    )


def pauli_correlators(joint: np.ndarray) -> CorrelatorSet:
    """All nine same-axis expectation values of a medium (x) battery state."""
    joint = validate_density(joint, check_spectrum=False)
    if joint.shape != (4, 4):
        raise DimensionError("pauli_correlators expects a two-qubit state")
    rho_m = partial_trace(joint, "medium")
    rho_b = partial_trace(joint, "battery")
    axes = ("x", "y", "z")
    return CorrelatorSet(
        medium=tuple(_expect(rho_m, _SIGMA[j]) for j in axes),
        battery=tuple(_expect(rho_b, _SIGMA[j]) for j in axes),
        joint=tuple(_expect(joint, kron(_SIGMA[j], _SIGMA[j])) for j in axes),
    )


def concurrence(joint: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state, in [0, 1].

    C = max(0, l1 - l2 - l3 - l4), where the l_i are the descending square
    roots of the eigenvalues of sqrt(rho) rho_tilde sqrt(rho) and
    rho_tilde = (sy x sy) conj(rho) (sy x sy). The product matrix is Hermitian
    PSD, so only Hermitian eigensolves are needed.
    """
    joint = validate_density(joint, check_spectrum=False)
    if joint.shape != (4, 4):
        raise DimensionError("concurrence expects a two-qubit state")
    yy = kron(_SIGMA["y"], _SIGMA["y"])
    tilde = yy @ joint.conj() @ yy
    root = sqrtm_psd(joint)
    m = root @ tilde @ root
    m = (m + m.conj().T) / 2
    lams = np.sqrt(clamp_spectrum(hermitian_eig(m).eigenvalues))[::-1]
    c = float(lams[0] - lams[1] - lams[2] - lams[3])
    return max(0.0, c)


def is_coherent(rho: np.ndarray, atol: float = EQUALITY_ATOL) -> bool:
    """True when any energy-basis off-diagonal element exceeds atol."""
    rho = np.asarray(rho)
    off = rho - np.diag(np.diag(rho))
    return float(np.max(np.abs(off))) > atol
