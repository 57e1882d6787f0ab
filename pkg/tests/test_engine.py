import math

import numpy as np
import pytest

from spinotto.diagnostics import Polarization, mean_energy, polarization_vector
from spinotto.engine import (
    ConfigError,
    EngineConfig,
    NoiseConfig,
    closed_form_work,
    flip_flop_propagator,
    power_stroke,
    prepare_battery,
    prepare_cold_medium,
    prepare_hot_medium,
    reset_medium,
    run_single_cycle,
)
from spinotto.linalg import hermitian_eig, kron, partial_trace, pauli, trace
from spinotto.validate import random_ideal_config


def random_density(rng, dim):
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real


def ket(index):
    rho = np.zeros((4, 4), dtype=complex)
    rho[index, index] = 1.0
    return rho


class TestPreparations:
    def test_hot_medium_maximal_coherence_is_pure(self):
        rho = prepare_hot_medium(0.5, (0.5, 0.5))
        assert np.allclose(rho, 0.5 * np.eye(2) + 0.5 * pauli("x"), atol=1e-15)
        w, _ = hermitian_eig(rho)
        assert np.allclose(w, [0, 1], atol=1e-12)

    def test_hot_medium_incoherent(self):
        rho = prepare_hot_medium(0.0, (0.485, 0.515))
        assert np.allclose(rho, np.diag([0.485, 0.515]), atol=1e-15)

    def test_hot_medium_positivity_bound(self):
        with pytest.raises(ConfigError, match=r"sqrt\(p0\*p1\)"):
            prepare_hot_medium(0.5, (0.485, 0.515))

    def test_population_validation(self):
        with pytest.raises(ConfigError):
            prepare_hot_medium(0.0, (0.6, 0.6))
        with pytest.raises(ConfigError):
            prepare_cold_medium((-0.1, 1.1))

    def test_battery_states(self):
        assert np.allclose(prepare_battery((0, 0, 0)), np.eye(2) / 2, atol=1e-15)
        assert np.allclose(
            prepare_battery((0, 0.5, 0)), 0.5 * np.eye(2) + 0.5 * pauli("y"), atol=1e-15
        )
        assert np.allclose(prepare_battery((0, 0, -0.5)), np.diag([0, 1]), atol=1e-15)

    def test_battery_bloch_bound(self):
        with pytest.raises(ConfigError):
            prepare_battery((0.4, 0.4, 0.4))


class TestPropagator:
    def test_zero_angle_is_identity(self):
        assert np.allclose(flip_flop_propagator(0.0), np.eye(4), atol=1e-15)

    def test_structure(self):
        u = flip_flop_propagator(0.3)
        assert u[0, 0] == 1 and u[3, 3] == 1
        assert u[1, 1] == pytest.approx(math.cos(0.3))
        assert u[1, 2] == pytest.approx(-1j * math.sin(0.3))

    def test_half_period_swaps_excitation(self):
        out = power_stroke(ket(2), math.pi / 2)  # |10><10| -> |01><01|
        assert np.allclose(out, ket(1), atol=1e-12)

    def test_unitarity(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u = flip_flop_propagator(float(rng.uniform(-2 * math.pi, 2 * math.pi)))
            assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-12


class TestPowerStroke:
    def test_zero_angle_leaves_state(self):
        rng = np.random.default_rng(1)
        joint = random_density(rng, 4)
        assert np.allclose(power_stroke(joint, 0.0), joint, atol=1e-15)

    def test_full_swap_transfers_one_quantum(self):
        joint = ket(1)  # medium excited (m=0), battery ground (b=1)
        before = mean_energy(partial_trace(joint, "battery"))
        swapped = power_stroke(joint, math.pi / 2)
        assert np.allclose(swapped, ket(2), atol=1e-12)
        after = mean_energy(partial_trace(swapped, "battery"))
        assert after - before == pytest.approx(1.0, abs=1e-12)

    def test_preserves_trace_and_positivity(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            out = power_stroke(random_density(rng, 4), float(rng.uniform(0, math.pi)))
            assert abs(trace(out) - 1) < 1e-12
            assert hermitian_eig(out).eigenvalues[0] > -1e-10

    def test_conserves_sector_populations(self):
        # |00> and |11> populations are untouched by the flip-flop
        rng = np.random.default_rng(3)
        for _ in range(50):
            joint = random_density(rng, 4)
            out = power_stroke(joint, float(rng.uniform(0, math.pi)))
            assert abs(out[0, 0] - joint[0, 0]) < 1e-12
            assert abs(out[3, 3] - joint[3, 3]) < 1e-12


class TestResetMedium:
    def test_separable_case(self):
        rng = np.random.default_rng(4)
        a, b, c = (random_density(rng, 2) for _ in range(3))
        assert np.allclose(reset_medium(kron(a, b), c), kron(c, b), atol=1e-12)

    def test_battery_marginal_preserved(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            joint = random_density(rng, 4)
            fresh = random_density(rng, 2)
            before = partial_trace(joint, "battery")
            after = partial_trace(reset_medium(joint, fresh), "battery")
            assert np.max(np.abs(after - before)) < 1e-12

    def test_cold_reset_preserves_battery_coherence(self):
        # correlated state from a stroke, then the experimental cold bath
        joint = kron(prepare_hot_medium(0.4, (0.5, 0.5)), prepare_battery((0, 0.3, -0.2)))
        joint = power_stroke(joint, 0.6)
        y_before = polarization_vector(partial_trace(joint, "battery")).py
        reset = reset_medium(joint, prepare_cold_medium((0.03, 0.97)))
        y_after = polarization_vector(partial_trace(reset, "battery")).py
        assert y_after == pytest.approx(y_before, abs=1e-14)


class TestClosedFormWork:
    def test_zero_angle_zero_work(self):
        cfg = EngineConfig(theta=0.0, hot_populations=(0.5, 0.5), cold_populations=(0, 1))
        assert closed_form_work(cfg).total == pytest.approx(0.0, abs=1e-15)

    def test_quantum_term_vanishes_without_medium_coherence(self):
        for theta in (0.2, 0.9, 1.4):
            cfg = EngineConfig(
                theta=theta,
                p_mx=0.0,
                hot_populations=(0.5, 0.5),
                cold_populations=(0, 1),
                battery_init=Polarization(0, 0.4, 0.1),
            )
            assert closed_form_work(cfg).quantum == 0.0

    def test_quantum_term_vanishes_for_classical_battery(self):
        for theta in (0.2, 0.9, 1.4):
            cfg = EngineConfig(
                theta=theta,
                p_mx=0.5,
                hot_populations=(0.5, 0.5),
                cold_populations=(0, 1),
                battery_init=Polarization(0.3, 0.0, -0.2),
            )
            assert closed_form_work(cfg).quantum == 0.0

    def test_full_swap_value(self):
        # theta = pi/2 drains a z-unpolarized battery into the ground-state
        # cold bath: half a quantum out, none of it coherence-driven
        cfg = EngineConfig(
            theta=math.pi / 2,
            p_mx=0.5,
            hot_populations=(0.5, 0.5),
            cold_populations=(0, 1),
            battery_init=Polarization(0, 0.5, 0),
        )
        breakdown = closed_form_work(cfg)
        assert breakdown.quantum == pytest.approx(0.0, abs=1e-15)
        assert breakdown.total == pytest.approx(-0.5, abs=1e-12)

    def test_split_sums_to_total(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            cfg = random_ideal_config(rng)
            b = closed_form_work(cfg)
            assert b.total == pytest.approx(b.classical + b.quantum, abs=1e-12)

    def test_regime_flag(self):
        assert closed_form_work(
            EngineConfig(hot_populations=(0.5, 0.5), cold_populations=(0, 1))
        ).eq_regime
        assert not closed_form_work(EngineConfig()).eq_regime  # experimental baths
        assert not closed_form_work(
            EngineConfig(
                hot_populations=(0.5, 0.5), cold_populations=(0, 1), theta_compression=0.2
            )
        ).eq_regime


class TestSingleCycle:
    def test_oracle_equivalence(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            cfg = random_ideal_config(rng)
            record, _ = run_single_cycle(cfg)
            assert abs(record.cycle_work - closed_form_work(cfg).total) < 1e-10

    def test_zero_angle_cycle_is_identity_on_battery(self):
        cfg = EngineConfig(
            theta=0.0,
            p_mx=0.3,
            hot_populations=(0.5, 0.5),
            cold_populations=(0, 1),
            battery_init=Polarization(0.1, 0.2, -0.3),
        )
        record, _ = run_single_cycle(cfg)
        assert record.cycle_work == pytest.approx(0.0, abs=1e-13)
        for got, expected in zip(record.battery_polarization, (0.1, 0.2, -0.3)):
            assert got == pytest.approx(expected, abs=1e-13)

    def test_classical_battery_first_cycle_indistinguishable(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            cfg = random_ideal_config(rng)
            cfg = EngineConfig(
                theta=cfg.theta,
                p_mx=cfg.p_mx,
                hot_populations=(0.5, 0.5),
                cold_populations=(0, 1),
                battery_init=cfg.battery_init._replace(py=0.0),
            )
            coherent, _ = run_single_cycle(cfg)
            incoherent, _ = run_single_cycle(cfg.with_p_mx(0.0))
            assert abs(coherent.cycle_work - incoherent.cycle_work) < 1e-12

    def test_coherent_enhancement_sign_and_size(self):
        # the work excess over the incoherent engine is exactly the coherence
        # cross term 2 p_mx p_y sin(t) cos^3(t), positive on (0, pi/2)
        rng = np.random.default_rng(9)
        for _ in range(50):
            theta = float(rng.uniform(0.05, math.pi / 2 - 0.05))
            p_mx = float(rng.uniform(0.05, 0.5))
            p_y = float(rng.uniform(0.05, 0.5))
            cfg = EngineConfig(
                theta=theta,
                p_mx=p_mx,
                hot_populations=(0.5, 0.5),
                cold_populations=(0, 1),
                battery_init=Polarization(0, p_y, 0),
            )
            coherent, _ = run_single_cycle(cfg)
            incoherent, _ = run_single_cycle(cfg.with_p_mx(0.0))
            gap = coherent.cycle_work - incoherent.cycle_work
            assert gap > 0
            expected = 2 * p_mx * p_y * math.sin(theta) * math.cos(theta) ** 3
            assert gap == pytest.approx(expected, abs=1e-12)

    def test_coherence_transfer_to_polarized_battery(self):
        # a ground-state battery picks up y-coherence within one cycle
        cfg = EngineConfig(
            theta=math.pi / 4,
            p_mx=0.5,
            hot_populations=(0.5, 0.5),
            cold_populations=(0, 1),
            battery_init=Polarization(0, 0, -0.5),
        )
        record, _ = run_single_cycle(cfg)
        assert abs(record.battery_polarization.py) > 0.1

    def test_stage_outputs_remain_valid(self):
        rng = np.random.default_rng(10)
        for _ in range(50):
            _, joint = run_single_cycle(random_ideal_config(rng))
            assert abs(trace(joint) - 1) < 1e-12
            assert hermitian_eig(joint).eigenvalues[0] > -1e-10


class TestEngineConfig:
    def test_defaults_are_valid(self):
        cfg = EngineConfig()
        assert cfg.hot_populations == (0.485, 0.515)
        assert cfg.cold_populations == (0.03, 0.97)
        assert cfg.noise.ideal

    def test_invalid_configs_raise(self):
        with pytest.raises(ConfigError):
            EngineConfig(p_mx=0.6)
        with pytest.raises(ConfigError):
            EngineConfig(battery_init=Polarization(0.5, 0.5, 0.5))
        with pytest.raises(ConfigError):
            EngineConfig(cycles=0)
        with pytest.raises(ConfigError):
            EngineConfig(hot_populations=(0.7, 0.7))
        with pytest.raises(ConfigError):
            NoiseConfig(battery_t2_per_cycle=1.5)

    def test_compression_angle_defaults_to_theta(self):
        assert EngineConfig(theta=0.7).compression_theta == 0.7
        assert EngineConfig(theta=0.7, theta_compression=0.2).compression_theta == 0.2
