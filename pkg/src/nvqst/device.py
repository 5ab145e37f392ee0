"""Simulated NV register: free precession, microwave pulses and photon-count readout.

All Hamiltonians are returned in angular units (rad/s) although parameters
are given as ordinary frequencies in Hz. The electron is reduced to the
``m_S = 0`` (|0>, bright) / ``m_S = -1`` (|1>, dark) subspace.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.linalg import expm

from .exceptions import CalibrationError, UsageError
from .spin import E, X, Y, Z, embed, phase_rotation, tensor, Rotation
from .states import basis_state

logger = logging.getLogger(__name__)

TWO_PI = 2 * np.pi


def derive_rng(seed, *keys) -> np.random.Generator:
    """Generator for a named sub-stream of a top-level integer seed."""
    if isinstance(seed, np.random.Generator):
        return seed
    base = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in (*base, *keys)]))


@dataclass(frozen=True)
class DeviceParams:
    """Static parameters of the register.

    ``A_hf`` is the electron-nuclear hyperfine coupling in Hz; a single
    number is shared by all nuclear qubits, a tuple gives one value per
    nuclear qubit. ``nuclear_rabi_freq=None`` disables direct nuclear driving.
    """

    D: float = 2.87e9
    B: float = 0.0
    gamma_e: float = 28.024951e9
    A_hf: Union[float, tuple] = 2.0e6
    rabi_freq: float = 9.0e6
    n: int = 1
    nuclear_rabi_freq: float | None = 100.0e3
    nuclear_zeeman: float = 0.0
    ideal_pulses: bool = True

    def __post_init__(self):
        if self.rabi_freq <= 0:
            raise UsageError("rabi_freq must be positive")
        if self.n not in (1, 2, 3):
            raise UsageError(f"n must be 1, 2 or 3, got {self.n}")
        if self.nuclear_rabi_freq is not None and self.nuclear_rabi_freq <= 0:
            raise UsageError("nuclear_rabi_freq must be positive or None")
        if isinstance(self.A_hf, (list, tuple)) and len(self.A_hf) != self.n - 1:
            raise UsageError(f"A_hf needs {self.n - 1} entries for n={self.n}")

    @property
    def couplings(self) -> tuple:
        if isinstance(self.A_hf, (list, tuple)):
            return tuple(float(a) for a in self.A_hf)
        return (float(self.A_hf),) * (self.n - 1)


@dataclass(frozen=True)
class NoiseParams:
    T2_star: float = 40e-6
    T2: float = 700e-6
    enabled: bool = True

    def __post_init__(self):
        if not (0 < self.T2_star <= self.T2):
            raise UsageError("need 0 < T2_star <= T2")


@dataclass(frozen=True)
class ReadoutCalibration:
    """Expected photons per shot for the bright (``r_max``) and dark (``r_min``) electron state."""

    r_max: float
    r_min: float
    r_max_err: float = 0.0
    r_min_err: float = 0.0

    def __post_init__(self):
        if not (self.r_max > self.r_min > 0):
            raise CalibrationError(
                f"calibration requires r_max > r_min > 0, got r_max={self.r_max}, r_min={self.r_min}")

    @property
    def delta_r(self) -> float:
        return self.r_max - self.r_min

    def to_dict(self) -> dict:
        return {"r_max": self.r_max, "r_min": self.r_min, "delta_r": self.delta_r,
                "r_max_err": self.r_max_err, "r_min_err": self.r_min_err}

    @classmethod
    def from_dict(cls, d) -> "ReadoutCalibration":
        return cls(d["r_max"], d["r_min"], d.get("r_max_err", 0.0), d.get("r_min_err", 0.0))


@dataclass(frozen=True)
class MeasurementRecord:
    """Photon counts accumulated for one tomography setting."""

    label: str
    sign: int
    shots: int
    total_photons: float
    calib: ReadoutCalibration

    def __post_init__(self):
        if self.shots < 1:
            raise UsageError("a record needs at least one shot")

    @property
    def setting_id(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.label

    @property
    def rate_estimate(self) -> float:
        return self.total_photons / self.shots

    def to_dict(self) -> dict:
        total = self.total_photons
        if float(total).is_integer():
            total = int(total)
        return {"label": self.label, "sign": self.sign, "shots": self.shots,
                "photons": total, "calibration": self.calib.to_dict()}

    @classmethod
    def from_dict(cls, d) -> "MeasurementRecord":
        return cls(d["label"], int(d["sign"]), int(d["shots"]), d["photons"],
                   ReadoutCalibration.from_dict(d["calibration"]))


@dataclass(frozen=True)
class Pulse:
    """Resonant pulse of ``angle`` about the equatorial axis at ``phase`` (0 = x, pi/2 = y)."""

    target: int
    angle: float
    phase: float
    duration: float


@dataclass(frozen=True)
class Delay:
    duration: float


@dataclass(frozen=True)
class PulseSequence:
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if any(s.duration < 0 for s in self.steps):
            raise UsageError("step durations must be non-negative")

    @property
    def total_duration(self) -> float:
        return float(sum(s.duration for s in self.steps))

    @property
    def n_pulses(self) -> int:
        return sum(isinstance(s, Pulse) for s in self.steps)

    @property
    def n_delays(self) -> int:
        return sum(isinstance(s, Delay) for s in self.steps)


# --- Hamiltonians ----------------------------------------------------------

def electron_hamiltonian(p: DeviceParams) -> np.ndarray:
    """Spin-1 electron Hamiltonian ``2 pi (D Sz^2 - B gamma_e Sz)`` in the lab frame."""
    sz = np.diag([1.0, 0.0, -1.0])
    return TWO_PI * (p.D * sz @ sz - p.B * p.gamma_e * sz).astype(complex)


def qubit_transition_frequency(p: DeviceParams) -> float:
    """Frequency (Hz) of the ``m_S = 0 <-> -1`` transition that defines the electron qubit."""
    return p.D + p.B * p.gamma_e


def qubit_hamiltonian(p: DeviceParams) -> np.ndarray:
    """Rotating-frame Hamiltonian on the computational subspace (always diagonal).

    The electron is on resonance, so its own term vanishes. Each nuclear
    qubit k contributes ``(A_k / 4) Z (x) Z_k`` and a Zeeman term
    ``(nuclear_zeeman / 2) Z_k``.
    """
    n = p.n
    h = np.zeros((2**n, 2**n), dtype=complex)
    for k, a in enumerate(p.couplings, start=1):
        zz = tensor(Z if q in (0, k) else E for q in range(n))
        h += (a / 4) * zz
        if p.nuclear_zeeman:
            h += (p.nuclear_zeeman / 2) * embed(Z, k, n)
    return TWO_PI * h


def detuned_hamiltonian(p: DeviceParams, detuning: float) -> np.ndarray:
    """``qubit_hamiltonian`` plus an electron detuning ``(detuning / 2) Z`` (Hz)."""
    return qubit_hamiltonian(p) + TWO_PI * (detuning / 2) * embed(Z, 0, p.n)


@lru_cache(maxsize=8)
def _electron_coherence_mask(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    ebit = (idx >> (n - 1)) & 1
    return ebit[:, None] != ebit[None, :]


def _unitary_conj(u, rho):
    return u @ rho @ u.conj().T


# --- dynamics ----------------------------------------------------------------

def apply_unitary(state, u) -> np.ndarray:
    return _unitary_conj(u, state)


def apply_pulse(state, r: Rotation, p: DeviceParams, ideal: bool | None = None) -> np.ndarray:
    """Apply an x/y rotation to ``state``.

    In ideal mode the pulse is the bare rotation; otherwise the free
    Hamiltonian acts during the finite pulse duration as well.
    """
    phase = 0.0 if r.axis == "x" else np.pi / 2
    return apply_phase_pulse(state, Pulse(r.target, r.angle, phase, pulse_duration(r.angle, r.target, p)),
                             p, ideal)


def pulse_duration(angle: float, target: int, p: DeviceParams) -> float:
    """Duration ``|angle| / (2 pi f)`` for the Rabi frequency of the addressed spin."""
    if target == 0:
        freq = p.rabi_freq
    else:
        if p.nuclear_rabi_freq is None:
            raise UsageError("nuclear driving disabled (nuclear_rabi_freq=None)")
        freq = p.nuclear_rabi_freq
    return abs(angle) / (TWO_PI * freq)


def pulse_unitary(pulse: Pulse, p: DeviceParams, ideal: bool | None = None) -> np.ndarray:
    ideal = p.ideal_pulses if ideal is None else ideal
    if ideal or pulse.angle == 0:
        return embed(phase_rotation(pulse.angle, pulse.phase), pulse.target, p.n)
    angle, phase = pulse.angle, pulse.phase
    if angle < 0:
        angle, phase = -angle, phase + np.pi
    freq = p.rabi_freq if pulse.target == 0 else p.nuclear_rabi_freq
    axis = np.cos(phase) * X + np.sin(phase) * Y
    h = qubit_hamiltonian(p) + TWO_PI * freq / 2 * embed(axis, pulse.target, p.n)
    return expm(-1j * h * (angle / (TWO_PI * freq)))


def apply_phase_pulse(state, pulse: Pulse, p: DeviceParams, ideal: bool | None = None) -> np.ndarray:
    return _unitary_conj(pulse_unitary(pulse, p, ideal), state)


def free_evolve(state, t: float, p: DeviceParams, noise: NoiseParams | None = None,
                detuning: float = 0.0) -> np.ndarray:
    """Free precession for ``t`` seconds with optional Gaussian electron dephasing.

    Coherences between different electron states are damped by
    ``exp(-(t / T2_star)**2)``; populations are untouched.
    """
    if t < 0:
        raise UsageError(f"evolution time must be non-negative, got {t}")
    state = np.asarray(state, dtype=complex)
    if t == 0:
        return state.copy()
    h = detuned_hamiltonian(p, detuning) if detuning else qubit_hamiltonian(p)
    # H is diagonal in the computational basis
    phases = np.exp(-1j * np.real(np.diag(h)) * t)
    out = phases[:, None] * state * phases.conj()[None, :]
    if noise is not None and noise.enabled:
        out = np.where(_electron_coherence_mask(p.n), out * np.exp(-(t / noise.T2_star) ** 2), out)
    return out


def run_sequence(state, seq: PulseSequence, p: DeviceParams, noise: NoiseParams | None = None,
                 ideal: bool | None = None) -> np.ndarray:
    """Play a pulse sequence on ``state``. Dephasing only acts during delays."""
    state = np.asarray(state, dtype=complex)
    for step in seq.steps:
        if isinstance(step, Delay):
            state = free_evolve(state, step.duration, p, noise)
        else:
            state = apply_phase_pulse(state, step, p, ideal)
    return state


# --- readout -------------------------------------------------------------------

def bright_population(state) -> float:
    """Population with the electron in |0>, summed over all nuclear states."""
    diag = np.real(np.diag(np.asarray(state)))
    return float(diag[: diag.size // 2].sum())


def expected_rate(state, c: ReadoutCalibration) -> float:
    """Mean photons per shot ``r_min + p_bright * delta_r``."""
    return c.r_min + bright_population(state) * c.delta_r


def simulate_counts(state, c: ReadoutCalibration, shots: int, seed=0, *, label: str = "",
                    sign: int = 1, poisson: bool = True, record_calib: ReadoutCalibration | None = None
                    ) -> MeasurementRecord:
    """Simulate ``shots`` destructive readouts of ``state``.

    ``c`` is the true readout response; ``record_calib`` (default ``c``) is
    the calibration snapshot stored with the record and later used for
    extraction. With ``poisson=False`` the total equals its expectation.
    """
    if shots < 1:
        raise UsageError("shots must be >= 1")
    rate = max(expected_rate(state, c), 0.0)
    if poisson:
        total = float(derive_rng(seed).poisson(shots * rate))
    else:
        total = shots * rate
    return MeasurementRecord(label, sign, int(shots), total, record_calib or c)


def polarized_state(n: int) -> np.ndarray:
    return basis_state(0, n)


def calibrate(truth: ReadoutCalibration, p: DeviceParams, shots: int | None, seed=0) -> ReadoutCalibration:
    """Estimate ``(r_max, r_min)`` from reference measurements.

    ``r_max`` is measured on the freshly polarized register and ``r_min``
    after an electron X_180. ``shots=None`` returns the truth exactly.
    """
    bright = polarized_state(p.n)
    dark = apply_pulse(bright, Rotation("x", np.pi, 0), p, ideal=True)
    if shots is None:
        r_max, r_min = expected_rate(bright, truth), expected_rate(dark, truth)
        return ReadoutCalibration(r_max, r_min)
    if shots < 1:
        raise UsageError("shots must be >= 1")
    rng = derive_rng(seed)
    hi = simulate_counts(bright, truth, shots, rng).rate_estimate
    lo = simulate_counts(dark, truth, shots, rng).rate_estimate
    logger.debug("calibration estimates r_max=%g r_min=%g from %d shots", hi, lo, shots)
    return ReadoutCalibration(hi, lo, float(np.sqrt(hi / shots)), float(np.sqrt(lo / shots)))
