import math
from dataclasses import replace

import numpy as np
import pytest

from spinotto.diagnostics import polarization_vector
from spinotto.engine import ConfigError, EngineConfig, NoiseConfig, run_single_cycle
from spinotto.linalg import ValidationError, hermitian_eig, kron, partial_trace, pauli, trace
from spinotto.multicycle import (
    advantage_fixture,
    compare_coherent_incoherent,
    dephase_battery,
    peak_advantage,
    run_engine,
    sweep,
)
from spinotto.validate import random_density, random_ideal_config

IDEAL = dict(hot_populations=(0.5, 0.5), cold_populations=(0.0, 1.0))


def records_equal(r1, r2):
    if (r1.cycle_index, r1.cycle_work, r1.cumulative_work) != (
        r2.cycle_index, r2.cycle_work, r2.cumulative_work
    ):
        return False
    if r1.battery_polarization != r2.battery_polarization:
        return False
    if (r1.coherence_rel_entropy, r1.concurrence_post_stroke) != (
        r2.coherence_rel_entropy, r2.concurrence_post_stroke
    ):
        return False
    if (r1.correlators.medium, r1.correlators.battery, r1.correlators.joint) != (
        r2.correlators.medium, r2.correlators.battery, r2.correlators.joint
    ):
        return False
    e1, e2 = r1.ergotropy, r2.ergotropy
    return (
        (e1.total, e1.incoherent, e1.coherent) == (e2.total, e2.incoherent, e2.coherent)
        and np.array_equal(e1.passive_state, e2.passive_state)
    )


class TestDephaseBattery:
    def test_factor_one_is_identity(self):
        rng = np.random.default_rng(0)
        joint = random_density(rng, 4)
        assert np.array_equal(dephase_battery(joint, 1.0), joint)

    def test_factor_zero_kills_battery_coherence(self):
        battery = 0.5 * np.eye(2) + 0.5 * pauli("y")
        joint = kron(np.eye(2, dtype=complex) / 2, battery)
        out = dephase_battery(joint, 0.0)
        marginal = partial_trace(out, "battery")
        assert np.allclose(marginal, np.eye(2) / 2, atol=1e-14)
        assert abs(marginal[0, 1]) < 1e-14

    def test_preserves_trace_and_hermiticity(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            joint = random_density(rng, 4)
            out = dephase_battery(joint, 0.7)
            assert abs(trace(out) - 1) < 1e-12
            assert np.max(np.abs(out - out.conj().T)) < 1e-12
            assert hermitian_eig(out).eigenvalues[0] > -1e-10

    def test_equals_phase_flip_channel(self):
        # f-dephasing is the phase flip with probability (1 - f)/2
        rng = np.random.default_rng(2)
        zz = kron(np.eye(2, dtype=complex), pauli("z"))
        for factor in (0.0, 0.3, 0.9):
            joint = random_density(rng, 4)
            p = (1 - factor) / 2
            expected = (1 - p) * joint + p * zz @ joint @ zz
            assert np.max(np.abs(dephase_battery(joint, factor) - expected)) < 1e-13

    def test_factor_out_of_range(self):
        rng = np.random.default_rng(3)
        with pytest.raises(ValidationError):
            dephase_battery(random_density(rng, 4), 1.2)


class TestRunEngine:
    def test_single_cycle_consistency(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            cfg = replace(random_ideal_config(rng), cycles=1)
            trace_one = run_engine(cfg)
            record, joint = run_single_cycle(cfg)
            got = trace_one.records[0]
            assert abs(got.cycle_work - record.cycle_work) < 1e-12
            assert np.max(np.abs(trace_one.final_joint - joint)) < 1e-12
            for a, b in zip(got.battery_polarization, record.battery_polarization):
                assert abs(a - b) < 1e-12

    def test_determinism_bit_exact(self):
        cfg = EngineConfig(theta=0.6, p_mx=0.3, cycles=12,
                           noise=NoiseConfig(0.97, 0.93))
        t1 = run_engine(cfg)
        t2 = run_engine(cfg)
        for r1, r2 in zip(t1.records, t2.records):
            assert records_equal(r1, r2)
        assert np.array_equal(t1.final_joint, t2.final_joint)

    def test_record_count_and_cumulative_sum(self):
        cfg = EngineConfig(theta=0.5, p_mx=0.4, cycles=15, **IDEAL)
        result = run_engine(cfg)
        assert len(result.records) == 15
        total = 0.0
        for record in result.records:
            total += record.cycle_work
            assert record.cumulative_work == pytest.approx(total, abs=1e-10)

    def test_states_stay_valid_with_noise(self):
        cfg = EngineConfig(
            theta=0.7, p_mx=0.4, cycles=25,
            noise=NoiseConfig(battery_dephasing_per_reset=0.9, battery_t2_per_cycle=0.85),
        )
        result = run_engine(cfg)
        assert abs(trace(result.final_joint) - 1) < 1e-12
        assert hermitian_eig(result.final_joint).eigenvalues[0] > -1e-10


class TestCompare:
    def test_no_coherence_means_no_advantage(self):
        cfg = EngineConfig(theta=0.6, p_mx=0.0, cycles=8, **IDEAL)
        result = compare_coherent_incoherent(cfg)
        for ratio in result.advantage:
            assert ratio is None or ratio == pytest.approx(0.0, abs=1e-12)

    def test_first_cycle_equal_then_divergence(self):
        cfg = EngineConfig(theta=math.pi / 4, p_mx=0.5, cycles=5,
                           battery_init=(0, 0, -0.5), **IDEAL)
        result = compare_coherent_incoherent(cfg)
        w1c = result.coherent.records[0].cycle_work
        w1i = result.incoherent.records[0].cycle_work
        assert abs(w1c - w1i) < 1e-10
        w2c = result.coherent.records[1].cycle_work
        w2i = result.incoherent.records[1].cycle_work
        assert w2c - w2i > 1e-6

    def test_full_swap_angle_gives_no_quantum_work_any_cycle(self):
        # cos(theta) = 0 kills the coherence cross term, so the work series
        # of the coherent and incoherent engines coincide cycle by cycle
        cfg = EngineConfig(theta=math.pi / 2, p_mx=0.5, cycles=10,
                           battery_init=(0, 0, -0.5), **IDEAL)
        result = compare_coherent_incoherent(cfg)
        for rc, ri in zip(result.coherent.records, result.incoherent.records):
            assert abs(rc.cycle_work - ri.cycle_work) < 1e-12

    def test_battery_gains_coherence_only_with_coherent_medium(self):
        cfg = EngineConfig(theta=math.pi / 4, p_mx=0.5, cycles=3,
                           battery_init=(0, 0, -0.5), **IDEAL)
        result = compare_coherent_incoherent(cfg)
        assert abs(result.coherent.records[0].battery_polarization.py) > 0.1
        assert abs(result.incoherent.records[0].battery_polarization.py) < 1e-14

    def test_maximally_mixed_battery_picks_up_coherence_on_later_cycles(self):
        # with P = 0 there is no z-polarization to convert on cycle 1; the
        # first cycle deposits some, and coherence transfer starts after it
        cfg = EngineConfig(theta=math.pi / 4, p_mx=0.5, cycles=2,
                           battery_init=(0, 0, 0), **IDEAL)
        trace_out = run_engine(cfg)
        assert abs(trace_out.records[0].battery_polarization.py) < 1e-14
        assert abs(trace_out.records[1].battery_polarization.py) > 1e-3


class TestFixture:
    def test_advantage_regression(self):
        result = compare_coherent_incoherent(advantage_fixture(10))
        assert result.advantage[1] == pytest.approx(2.0, abs=1e-9)
        assert result.advantage[2] == pytest.approx(4.0, abs=1e-9)

    def test_peak_at_most_ten_cycles(self):
        result = compare_coherent_incoherent(advantage_fixture(10))
        peak = peak_advantage(result)
        assert peak is not None
        ratio, cycle = peak
        assert cycle <= 10 and ratio >= 1.5

    def test_rise_then_fall_of_coherence(self):
        cfg = replace(advantage_fixture(30), noise=NoiseConfig(battery_t2_per_cycle=0.9))
        records = run_engine(cfg).records
        coherences = [r.coherence_rel_entropy for r in records]
        coherent_ergo = [r.ergotropy.coherent for r in records]
        for series in (coherences, coherent_ergo):
            peak = max(range(len(series)), key=lambda i: series[i])
            assert 0 < peak < len(series) - 1
            assert series[peak] > series[0]
            assert series[peak] > series[-1]

    def test_dephasing_monotonically_reduces_work(self):
        totals = []
        for t2 in (1.0, 0.9, 0.7):
            cfg = replace(advantage_fixture(30), noise=NoiseConfig(battery_t2_per_cycle=t2))
            totals.append(run_engine(cfg).records[-1].cumulative_work)
        assert totals[0] >= totals[1] >= totals[2]


class TestSweep:
    def test_zero_angle_sweep(self):
        cfg = EngineConfig(theta=0.5, p_mx=0.3, cycles=1, **IDEAL)
        traces = sweep(cfg, "theta", [0.0])
        assert len(traces) == 1
        assert traces[0].records[0].cycle_work == pytest.approx(0.0, abs=1e-13)

    def test_result_order_matches_values(self):
        cfg = EngineConfig(p_mx=0.3, cycles=1, **IDEAL)
        values = [0.9, 0.1, 0.5]
        traces = sweep(cfg, "theta", values)
        assert [t.config.theta for t in traces] == values

    def test_sweepable_fields(self):
        cfg = EngineConfig(cycles=2, battery_init=(0, 0, -0.4), **IDEAL)
        assert sweep(cfg, "p_mx", [0.0, 0.2])[1].config.p_mx == 0.2
        assert sweep(cfg, "battery_py", [0.25])[0].config.battery_init.py == 0.25
        assert sweep(cfg, "cycles", [4])[0].config.cycles == 4
        assert (
            sweep(cfg, "battery_t2_per_cycle", [0.8])[0].config.noise.battery_t2_per_cycle
            == 0.8
        )

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError):
            sweep(EngineConfig(), "coupling", [1.0])

    def test_parallel_matches_sequential(self):
        cfg = EngineConfig(p_mx=0.3, cycles=3, **IDEAL)
        values = [0.2, 0.5, 0.8, 1.1]
        seq = sweep(cfg, "theta", values, workers=1)
        par = sweep(cfg, "theta", values, workers=2)
        for a, b in zip(seq, par):
            for r1, r2 in zip(a.records, b.records):
                assert records_equal(r1, r2)


def test_reset_preserves_all_three_polarization_components():
    rng = np.random.default_rng(5)
    cfg = EngineConfig(theta=0.8, p_mx=0.4, cycles=1,
                       battery_init=(0.1, 0.3, -0.2), **IDEAL)
    from spinotto.engine import power_stroke, prepare_battery, prepare_hot_medium, reset_medium

    joint = kron(prepare_hot_medium(cfg.p_mx, cfg.hot_populations),
                 prepare_battery(cfg.battery_init))
    joint = power_stroke(joint, cfg.theta)
    before = polarization_vector(partial_trace(joint, "battery"))
    after = polarization_vector(
        partial_trace(reset_medium(joint, random_density(rng, 2)), "battery")
    )
    for a, b in zip(before, after):
        assert abs(a - b) < 1e-13
