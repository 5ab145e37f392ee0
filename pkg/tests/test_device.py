import numpy as np
import pytest

from nvqst.device import (DeviceParams, NoiseParams, ReadoutCalibration, apply_pulse, bright_population,
                          calibrate, expected_rate, free_evolve, qubit_hamiltonian, qubit_transition_frequency,
                          simulate_counts)
from nvqst.exceptions import CalibrationError, UsageError
from nvqst.spin import E, Rotation, Z, rotation_matrix, tensor
from nvqst.states import basis_state, maximally_mixed, pure_state, random_density_matrix

PLUS = pure_state([1, 1])
ZERO = basis_state(0, 1)


def test_params_validation():
    with pytest.raises(UsageError):
        DeviceParams(rabi_freq=0)
    with pytest.raises(UsageError):
        DeviceParams(n=4)
    with pytest.raises(UsageError):
        NoiseParams(T2_star=1e-3, T2=1e-4)
    with pytest.raises(CalibrationError):
        ReadoutCalibration(0.02, 0.03)
    assert ReadoutCalibration(0.03, 0.01).delta_r == 0.03 - 0.01


def test_transition_frequency():
    p = DeviceParams(B=0.01)
    assert qubit_transition_frequency(p) == pytest.approx(2.87e9 + 0.01 * 28.024951e9)


def test_hamiltonian_single_qubit_is_zero(device1):
    assert np.array_equal(qubit_hamiltonian(device1), np.zeros((2, 2)))


def test_hamiltonian_two_qubit_diagonal():
    a = 1.5e6
    h = qubit_hamiltonian(DeviceParams(n=2, A_hf=a))
    expected = [2 * np.pi * a / 4 * ze * zn for ze in (1, -1) for zn in (1, -1)]
    assert np.allclose(np.diag(h), expected)
    assert np.allclose(h, np.diag(np.diag(h)))
    ze = tensor([Z, E])
    h2 = qubit_hamiltonian(DeviceParams(n=2, A_hf=a, nuclear_zeeman=3e5))
    assert np.allclose(h2 @ ze, ze @ h2)


def test_pulse_examples(device1):
    assert np.allclose(apply_pulse(ZERO, Rotation("x", np.pi), device1), basis_state(1, 1))
    assert np.allclose(apply_pulse(ZERO, Rotation("y", np.pi / 2), device1), PLUS)
    twice = apply_pulse(apply_pulse(ZERO, Rotation("x", np.pi / 2), device1), Rotation("x", np.pi / 2), device1)
    assert np.allclose(twice, apply_pulse(ZERO, Rotation("x", np.pi), device1), atol=1e-12)


def test_pulse_preserves_trace_and_purity(rng, device2):
    rho = random_density_matrix(2, rng)
    out = apply_pulse(rho, Rotation("y", 1.1, 1), device2)
    assert np.trace(out) == pytest.approx(1.0)
    assert np.trace(out @ out).real == pytest.approx(np.trace(rho @ rho).real)


def test_finite_pulse_on_resonance_matches_ideal(device1):
    # with a vanishing free Hamiltonian, finite and ideal pulses coincide
    r = Rotation("y", np.pi / 2)
    assert np.allclose(apply_pulse(ZERO, r, device1, ideal=False), apply_pulse(ZERO, r, device1, ideal=True))


def test_free_evolve(device1, device2, noise, rng):
    assert np.allclose(free_evolve(PLUS, 0.0, device1, noise), PLUS)
    diag = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    assert np.allclose(free_evolve(diag, 3e-6, device2, noise), diag)
    damped = free_evolve(PLUS, noise.T2_star, device1, noise)
    assert abs(damped[0, 1]) == pytest.approx(0.5 * np.exp(-1))
    assert damped[0, 0] == pytest.approx(0.5)
    with pytest.raises(UsageError):
        free_evolve(PLUS, -1.0, device1)
    rho = random_density_matrix(2, rng)
    out = free_evolve(rho, 20e-6, device2, noise)
    assert np.trace(out) == pytest.approx(1.0)
    assert np.linalg.eigvalsh(out).min() >= -1e-12


def test_free_evolve_hyperfine_phase(device2):
    # |+>|0> under (A/4) ZZ: electron coherence precesses at -A/2 while nucleus is |0>
    psi = pure_state([1, 0, 1, 0])
    t = 0.1e-6
    out = free_evolve(psi, t, device2)
    phase = np.angle(out[0, 2])
    assert phase == pytest.approx(-2 * np.pi * 2e6 / 2 * t)


def test_expected_rate(calib):
    assert expected_rate(ZERO, calib) == pytest.approx(calib.r_max)
    assert expected_rate(basis_state(1, 1), calib) == pytest.approx(calib.r_min)
    assert expected_rate(maximally_mixed(2), calib) == pytest.approx(calib.r_min + calib.delta_r / 2)


def test_expected_rate_affine_and_nuclear_blind(calib, rng):
    a, b = random_density_matrix(2, rng), random_density_matrix(2, rng)
    alpha = 0.37
    mixed = expected_rate(alpha * a + (1 - alpha) * b, calib)
    assert mixed == pytest.approx(alpha * expected_rate(a, calib) + (1 - alpha) * expected_rate(b, calib))
    for axis, angle in [("x", 0.7), ("y", 2.1), ("x", np.pi)]:
        u = rotation_matrix(Rotation(axis, angle, 1), 2)
        assert expected_rate(u @ a @ u.conj().T, calib) == pytest.approx(expected_rate(a, calib), abs=1e-15)


def test_simulate_counts_statistics_and_determinism(calib):
    shots = 10_000_000
    rec = simulate_counts(PLUS, calib, shots, seed=5)
    r = expected_rate(PLUS, calib)
    assert abs(rec.rate_estimate - r) < 5 * np.sqrt(r / shots)
    again = simulate_counts(PLUS, calib, shots, seed=5)
    assert rec.total_photons == again.total_photons
    bright = ReadoutCalibration(0.05, 1e-300)
    recs = [simulate_counts(ZERO, bright, 1000, seed=s).total_photons for s in range(200)]
    # mean of 200 Poisson(50) totals
    assert abs(np.mean(recs) - 1000 * 0.05) < 5 * np.sqrt(50 / 200)
    with pytest.raises(UsageError):
        simulate_counts(PLUS, calib, 0)


def test_calibrate(device1, calib):
    exact = calibrate(calib, device1, None)
    assert (exact.r_max, exact.r_min) == (calib.r_max, calib.r_min)
    est = calibrate(calib, device1, 1_000_000, seed=3)
    assert abs(est.r_max - calib.r_max) < 5 * np.sqrt(calib.r_max / 1_000_000)
    assert abs(est.r_min - calib.r_min) < 5 * np.sqrt(calib.r_min / 1_000_000)
    assert est == calibrate(calib, device1, 1_000_000, seed=3)
    with pytest.raises(CalibrationError):
        # a handful of shots cannot resolve the contrast
        for seed in range(50):
            calibrate(calib, device1, 1, seed=seed)


def test_bright_population_three_qubits():
    rho = basis_state(3, 3)  # |011>: electron bright
    assert bright_population(rho) == 1.0
    assert bright_population(basis_state(4, 3)) == 0.0
