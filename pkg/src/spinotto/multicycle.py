"""N-cycle engine trajectories with phenomenological imperfection channels.

Each cycle is hot reset -> power stroke -> cold reset -> power stroke, with
battery dephasing applied at every medium reset and once per cycle. Traces are
deterministic: identical configs produce bit-identical records.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .diagnostics import mean_energy
from .engine import (
    ConfigError,
    CycleRecord,
    EngineConfig,
    flip_flop_propagator,
    make_cycle_record,
    prepare_battery,
    prepare_cold_medium,
    prepare_hot_medium,
    run_single_cycle,
)
from .linalg import ValidationError, kron, partial_trace, validate_density

ADVANTAGE_FLOOR = 1e-12  # baseline work below this leaves the ratio undefined


@dataclass(frozen=True)
class EngineTrace:
    """Per-cycle records of one engine run plus the final joint state."""

    config: EngineConfig
    records: tuple[CycleRecord, ...]
    final_joint: np.ndarray


@dataclass(frozen=True)
class ComparisonResult:
    """Coherent run, its incoherent twin, and the per-cycle advantage ratio.

    advantage[n] is (W_coh - W_incoh) / W_incoh for cycle n+1, or None when
    the incoherent baseline work is at or below ADVANTAGE_FLOOR.
    """

    coherent: EngineTrace
    incoherent: EngineTrace
    advantage: tuple[float | None, ...]


def dephase_battery(joint: np.ndarray, factor: float) -> np.ndarray:
    """Scale every element connecting different battery sigma_z eigenstates.

    A factor f in [0, 1] realizes the phase-flip channel with flip probability
    (1 - f)/2 on the battery: completely positive, trace preserving, and the
    identity channel at f = 1.
    """
    if not 0.0 <= factor <= 1.0:
        raise ValidationError(f"dephasing factor must lie in [0, 1], got {factor}")
    joint = validate_density(joint, check_spectrum=False)
    if joint.shape != (4, 4):
        raise ValidationError("dephase_battery expects a two-qubit state")
    out = joint.reshape(2, 2, 2, 2).copy()
    out[:, 0, :, 1] *= factor
    out[:, 1, :, 0] *= factor
    return out.reshape(4, 4)


def run_engine(config: EngineConfig) -> EngineTrace:
    """Iterate config.cycles engine cycles and record every diagnostic.

    The hot reset rebuilds the medium in the coherently heated state, the cold
    reset in the cold-bath state; both discard medium-battery correlations
    while preserving the battery marginal, then apply the per-reset battery
    dephasing factor. Work per cycle is the battery mean-energy change.
    """
    battery = prepare_battery(config.battery_init)
    hot = prepare_hot_medium(config.p_mx, config.hot_populations)
    cold = prepare_cold_medium(config.cold_populations)
    u_exp = flip_flop_propagator(config.theta)
    u_cmp = flip_flop_propagator(config.compression_theta)
    reset_f = config.noise.battery_dephasing_per_reset
    t2_f = config.noise.battery_t2_per_cycle

    records: list[CycleRecord] = []
    cumulative = 0.0
    joint = None
    for n in range(1, config.cycles + 1):
        energy_in = mean_energy(battery)
        joint = dephase_battery(kron(hot, battery), reset_f)
        joint = u_exp @ joint @ u_exp.conj().T
        post_stroke = joint
        joint = dephase_battery(kron(cold, partial_trace(joint, "battery")), reset_f)
        joint = u_cmp @ joint @ u_cmp.conj().T
        joint = dephase_battery(joint, t2_f)
        battery = partial_trace(joint, "battery")
        work = mean_energy(battery) - energy_in
        cumulative += work
        records.append(make_cycle_record(n, work, cumulative, battery, post_stroke))

    return EngineTrace(config=config, records=tuple(records), final_joint=joint)


def compare_coherent_incoherent(config: EngineConfig) -> ComparisonResult:
    """Run the config as given and with p_mx = 0, and form the advantage series."""
    coherent = run_engine(config)
    incoherent = run_engine(config.with_p_mx(0.0))
    advantage = []
    for rc, ri in zip(coherent.records, incoherent.records):
        if ri.cycle_work <= ADVANTAGE_FLOOR:
            advantage.append(None)
        else:
            advantage.append((rc.cycle_work - ri.cycle_work) / ri.cycle_work)
    return ComparisonResult(coherent=coherent, incoherent=incoherent, advantage=tuple(advantage))


def advantage_fixture(cycles: int = 10) -> EngineConfig:
    """Frozen grid-search result: an ideal-regime configuration with a large
    early coherent work advantage.

    Found by searching theta in (0, pi/2) and p_mx in (0, 0.5] under ideal
    noise with a ground-state battery: at theta = pi/4, p_mx = 0.5 the
    per-cycle advantage reaches 2.0 on cycle 2 and 4.0 on cycle 3. Kept as a
    regression anchor; re-derivable with the search-default preset.
    """
    return EngineConfig(
        theta=0.7853981633974483,
        p_mx=0.5,
        hot_populations=(0.5, 0.5),
        cold_populations=(0.0, 1.0),
        battery_init=(0.0, 0.0, -0.5),
        cycles=cycles,
    )


def peak_advantage(result: ComparisonResult) -> tuple[float, int] | None:
    """Largest defined advantage ratio and the 1-based cycle where it occurs.

    Returns None when no cycle has a defined ratio. Ties keep the earliest
    cycle, so the answer is deterministic.
    """
    best: tuple[float, int] | None = None
    for record, ratio in zip(result.coherent.records, result.advantage):
        if ratio is None:
            continue
        if best is None or ratio > best[0]:
            best = (ratio, record.cycle_index)
    return best


def _apply_sweep_value(config: EngineConfig, name: str, value) -> EngineConfig:
    if name == "theta":
        return replace(config, theta=float(value))
    if name == "theta_compression":
        return replace(config, theta_compression=float(value))
    if name == "p_mx":
        return replace(config, p_mx=float(value))
    if name in ("battery_px", "battery_py", "battery_pz"):
        p = config.battery_init._replace(**{name.removeprefix("battery_"): float(value)})
        return replace(config, battery_init=p)
    if name in ("battery_dephasing_per_reset", "battery_t2_per_cycle"):
        return replace(config, noise=replace(config.noise, **{name: float(value)}))
    if name == "cycles":
        return replace(config, cycles=int(value))
    raise ConfigError(f"unknown sweep field {name!r}")


SWEEPABLE_FIELDS = (
    "theta",
    "theta_compression",
    "p_mx",
    "battery_px",
    "battery_py",
    "battery_pz",
    "battery_dephasing_per_reset",
    "battery_t2_per_cycle",
    "cycles",
)


def sweep(
    config: EngineConfig,
    field_name: str,
    values: Sequence,
    workers: int = 1,
) -> list[EngineTrace]:
    """Run one independent trace per value of the named config field.

    Results are returned in the order of `values`. With workers > 1 the traces
    are computed in parallel processes; the collection order is unchanged.
    """
    if field_name not in SWEEPABLE_FIELDS:
        raise ConfigError(
            f"unknown sweep field {field_name!r}; expected one of {', '.join(SWEEPABLE_FIELDS)}"
        )
    configs = [_apply_sweep_value(config, field_name, v) for v in values]
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_engine, configs))
    return [run_engine(c) for c in configs]


def single_cycle_consistency(config: EngineConfig) -> float:
    """Max absolute difference between run_engine (N=1, ideal noise) and
    run_single_cycle over work and battery polarization; used by self checks."""
    base = replace(config, cycles=1, noise=type(config.noise)())
    trace = run_engine(base)
    record, _ = run_single_cycle(base)
    multi = trace.records[0]
    diffs = [abs(multi.cycle_work - record.cycle_work)]
    diffs.extend(
        abs(a - b)
        for a, b in zip(multi.battery_polarization, record.battery_polarization)
    )
    return max(diffs)
