"""The four-stroke spin engine: state preparation, flip-flop power strokes,
bath resets, and the closed-form work of one ideal cycle.

One cycle runs hot preparation -> power stroke -> cold reset -> power stroke
on the joint medium (x) battery state. Work is the change of the battery's
mean energy over the full cycle, reported in units of hbar*omega_B.

Conventions fixed package-wide: basis order |m b> in {|00>,|01>,|10>,|11>},
|0> the +1 eigenstate of sigma_z (excited, energy +hbar*omega/2), states
parameterized as rho = I/2 + P.sigma with |P| <= 1/2. The flip-flop stroke is
defined directly as the unitary that rotates the {|01>,|10>} subspace by the
angle theta and leaves |00>, |11> untouched; this corresponds to the exchange
Hamiltonian g(s+ s- + s- s+) with the standard halved ladder operators
s+- = (sigma^x +- i sigma^y)/2 and theta = g*t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .diagnostics import (
    CorrelatorSet,
    ErgotropyReport,
    Polarization,
    concurrence,
    ergotropy,
    mean_energy,
    pauli_correlators,
    polarization_vector,
    relative_entropy_of_coherence,
)
from .linalg import (
    ValidationError,
    kron,
    partial_trace,
    pauli,
    validate_density,
)

# Swap-angle normalization: the exchange Hamiltonian written with the
# unnormalized ladder operators sigma^+- = sigma^x +- i sigma^y carries a
# matrix element 4g on the flip-flop subspace. The propagator below uses the
# halved-ladder normalization, for which the matrix element is exactly g and
# the subspace rotation angle equals theta = g*t.
FLIP_FLOP_MATRIX_ELEMENT_OVER_G = 1.0


class ConfigError(ValidationError):
    """An engine configuration violates one of its invariants."""


@dataclass(frozen=True)
class NoiseConfig:
    """Phenomenological imperfection channels for multi-cycle runs.

    battery_dephasing_per_reset multiplies the battery's energy-basis
    coherences at each medium reset (hot and cold), standing in for residual
    transverse coupling during the reset. battery_t2_per_cycle applies the
    same channel once per cycle for ambient decoherence. Both equal to 1 is
    the ideal (noise-free) engine.
    """

    battery_dephasing_per_reset: float = 1.0
    battery_t2_per_cycle: float = 1.0

    def __post_init__(self):
        for name in ("battery_dephasing_per_reset", "battery_t2_per_cycle"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")

    @property
    def ideal(self) -> bool:
        return self.battery_dephasing_per_reset == 1.0 and self.battery_t2_per_cycle == 1.0


def _check_populations(name: str, pops) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in pops)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair of numbers, got {pops!r}") from None
    if not (0.0 <= a <= 1.0 and 0.0 <= b <= 1.0):
        raise ConfigError(f"{name} entries must lie in [0, 1], got ({a}, {b})")
    if abs(a + b - 1.0) > 1e-10:
        raise ConfigError(f"{name} must sum to 1, got {a} + {b} = {a + b}")
    return (a, b)


@dataclass(frozen=True)
class EngineConfig:
    """All physical and protocol parameters of an engine run.

    Frequencies are in arbitrary angular units; they only set the absolute
    energy scale, never the dynamics, because every reported energy is already
    expressed in units of hbar*omega of the respective qubit. Bath populations
    are listed in basis order (excited, ground); the defaults are the
    experimental bath diagonals diag(0.485, 0.515) and diag(0.03, 0.97).
    """

    omega_m: float = 1.0
    omega_b: float = 1.0
    theta: float = math.pi / 4
    theta_compression: float | None = None
    p_mx: float = 0.45
    hot_populations: tuple[float, float] = (0.485, 0.515)
    cold_populations: tuple[float, float] = (0.03, 0.97)
    battery_init: Polarization = Polarization(0.0, 0.0, -0.5)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    cycles: int = 1

    def __post_init__(self):
        object.__setattr__(self, "hot_populations", _check_populations("hot_populations", self.hot_populations))
        object.__setattr__(self, "cold_populations", _check_populations("cold_populations", self.cold_populations))
        object.__setattr__(self, "battery_init", Polarization(*(float(x) for x in self.battery_init)))
        p0, p1 = self.hot_populations
        bound = math.sqrt(p0 * p1)
        if abs(self.p_mx) > bound + 1e-12:
            raise ConfigError(
                f"|p_mx| = {abs(self.p_mx)} exceeds the positivity bound "
                f"sqrt(p0*p1) = {bound:.12g} for hot populations ({p0}, {p1})"
            )
        if self.battery_init.norm() > 0.5 + 1e-12:
            raise ConfigError(
                f"battery polarization magnitude {self.battery_init.norm():.12g} exceeds 1/2"
            )
        if self.cycles < 1:
            raise ConfigError(f"cycles must be a positive integer, got {self.cycles}")
        for name in ("omega_m", "omega_b", "theta"):
            if not math.isfinite(float(getattr(self, name))):
                raise ConfigError(f"{name} must be finite")
        if self.theta_compression is not None and not math.isfinite(float(self.theta_compression)):
            raise ConfigError("theta_compression must be finite")

    @property
    def compression_theta(self) -> float:
        """Second-stroke angle; equals theta unless explicitly overridden."""
        return self.theta if self.theta_compression is None else self.theta_compression

    def with_p_mx(self, p_mx: float) -> "EngineConfig":
        return replace(self, p_mx=p_mx)


@dataclass(frozen=True)
class WorkBreakdown:
    """Cycle work split into its population part and its coherence cross term.

    eq_regime is True when the closed-form assumptions hold (symmetric hot
    populations, pure-ground cold bath, equal stroke angles); outside that
    regime the numbers are an extrapolation and the flag is False.
    """

    total: float
    classical: float
    quantum: float
    eq_regime: bool = True


@dataclass(frozen=True)
class CycleRecord:
    """Every diagnostic recorded for one engine cycle.

    Correlators and concurrence are measured immediately after the first
    power stroke (the state-verification point); the battery polarization,
    ergotropy and coherence refer to the battery at the end of the cycle.
    """

    cycle_index: int
    cycle_work: float
    cumulative_work: float
    battery_polarization: Polarization
    ergotropy: ErgotropyReport
    coherence_rel_entropy: float
    concurrence_post_stroke: float
    correlators: CorrelatorSet


def prepare_hot_medium(p_mx: float, populations: Sequence[float]) -> np.ndarray:
    """Coherently heated medium state diag(p0, p1) + p_mx * sigma_x.

    Positivity requires |p_mx| <= sqrt(p0*p1); violating inputs raise a
    ConfigError naming that bound.
    """
    p0, p1 = _check_populations("hot_populations", populations)
    bound = math.sqrt(p0 * p1)
    if abs(p_mx) > bound + 1e-12:
        raise ConfigError(
            f"|p_mx| = {abs(p_mx)} exceeds the positivity bound sqrt(p0*p1) = {bound:.12g}"
        )
    rho = np.diag([p0, p1]).astype(complex) + p_mx * pauli("x")
    return validate_density(rho)


def prepare_cold_medium(populations: Sequence[float]) -> np.ndarray:
    """Diagonal cold-bath state diag(q0, q1)."""
    q0, q1 = _check_populations("cold_populations", populations)
    return np.diag([q0, q1]).astype(complex)


def prepare_battery(p: Polarization | Sequence[float]) -> np.ndarray:
    """Battery state I/2 + px*sx + py*sy + pz*sz for |P| <= 1/2."""
    p = Polarization(*(float(x) for x in p))
    if p.norm() > 0.5 + 1e-12:
        raise ConfigError(f"battery polarization magnitude {p.norm():.12g} exceeds 1/2")
    rho = 0.5 * pauli("identity") + p.px * pauli("x") + p.py * pauli("y") + p.pz * pauli("z")
    return validate_density(rho)


def flip_flop_propagator(theta: float) -> np.ndarray:
    """Unitary of one power stroke: rotation by theta on the {|01>,|10>} subspace.

    Acts as the identity on |00> and |11>; on the one-excitation subspace it is
    [[cos(theta), -i sin(theta)], [-i sin(theta), cos(theta)]]. theta = pi/2 is
    a full population swap between medium and battery.
    """
    c, s = math.cos(theta), math.sin(theta)
    u = np.eye(4, dtype=complex)
    u[1, 1] = c
    u[2, 2] = c
    u[1, 2] = -1j * s
    u[2, 1] = -1j * s
    return u


def power_stroke(joint: np.ndarray, theta: float) -> np.ndarray:
    """Conjugate the joint state by the flip-flop unitary."""
    joint = validate_density(joint, check_spectrum=False)
    u = flip_flop_propagator(theta)
    return u @ joint @ u.conj().T


def reset_medium(joint: np.ndarray, fresh: np.ndarray) -> np.ndarray:
    """Replace the medium marginal with a fresh bath state.

    Equivalent to a SWAP with an uncorrelated ancilla: the battery marginal is
    preserved exactly and all medium-battery correlations are discarded.
    """
    joint = validate_density(joint, check_spectrum=False)
    return kron(fresh, partial_trace(joint, "battery"))


def closed_form_work(config: EngineConfig) -> WorkBreakdown:
    """Exact closed-form work of one ideal cycle, in units of hbar*omega_B.

        W = 2*P_M^x*P_B^y*sin(t)cos^3(t) + P_B^z*(cos^4(t)-1) - sin^2(t)/2

    The quantum part is the coherence cross term (first summand); the
    classical part is the rest. The formula is derived for symmetric hot
    populations (1/2, 1/2), a pure-ground cold bath (0, 1) and equal stroke
    angles; eq_regime flags whether the supplied config satisfies that.
    """
    theta = config.theta
    c, s = math.cos(theta), math.sin(theta)
    quantum = 2.0 * config.p_mx * config.battery_init.py * s * c**3
    classical = config.battery_init.pz * (c**4 - 1.0) - 0.5 * s**2
    in_regime = (
        abs(config.hot_populations[0] - 0.5) <= 1e-12
        and abs(config.cold_populations[0]) <= 1e-12
        and config.compression_theta == theta
    )
    return WorkBreakdown(
        total=quantum + classical,
        classical=classical,
        quantum=quantum,
        eq_regime=in_regime,
    )


def make_cycle_record(
    index: int,
    cycle_work: float,
    cumulative_work: float,
    battery: np.ndarray,
    post_stroke_joint: np.ndarray,
) -> CycleRecord:
    """Assemble the full diagnostic record for one completed cycle."""
    return CycleRecord(
        cycle_index=index,
        cycle_work=cycle_work,
        cumulative_work=cumulative_work,
        battery_polarization=polarization_vector(battery),
        ergotropy=ergotropy(battery),
        coherence_rel_entropy=relative_entropy_of_coherence(battery),
        concurrence_post_stroke=concurrence(post_stroke_joint),
        correlators=pauli_correlators(post_stroke_joint),
    )


def run_single_cycle(config: EngineConfig) -> tuple[CycleRecord, np.ndarray]:
    """Simulate one full cycle by explicit density-matrix evolution.

    This is the brute-force reference against which closed_form_work is
    checked: hot preparation, power stroke, cold reset, power stroke, with the
    work read off as the battery's mean-energy change. Returns the diagnostics
    record and the final joint state.
    """
    battery = prepare_battery(config.battery_init)
    hot = prepare_hot_medium(config.p_mx, config.hot_populations)
    cold = prepare_cold_medium(config.cold_populations)

    energy_in = mean_energy(battery)
    joint = kron(hot, battery)
    joint = power_stroke(joint, config.theta)
    post_stroke = joint
    joint = reset_medium(joint, cold)
    joint = power_stroke(joint, config.compression_theta)

    battery_out = partial_trace(joint, "battery")
    work = mean_energy(battery_out) - energy_in
    record = make_cycle_record(1, work, work, battery_out, post_stroke)
    return record, joint
