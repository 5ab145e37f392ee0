"""Time-independent state tomography: prepare, convert, count, extract, reconstruct.

Each non-identity Pauli product is measured in its own setting: the
register is freshly prepared (readout is destructive), the product is
rotated onto ``Z E ... E`` by its conversion plan, and the photon count
gives the coefficient through the calibration affine map.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .device import (DeviceParams, MeasurementRecord, NoiseParams, ReadoutCalibration, derive_rng,
                     run_sequence, simulate_counts)
from .exceptions import CalibrationError, IncompleteRunError, UsageError
from .planner import CZ, compile_circuit, frame_unitary, plan_full_schedule
from .spin import Rotation, pauli_labels
from .states import PauliDecomposition, basis_state, maximally_mixed, project_physical, pure_state, recompose
from .validation import check_density_matrix, n_qubits_of

HALF_PI = np.pi / 2
SQRT_HALF = 1 / np.sqrt(2)

# streams below a run seed; settings use (seed, SETTINGS_STREAM, index)
SETTINGS_STREAM = 1


@dataclass(frozen=True, eq=False)
class PreparedState:
    label: str
    n: int
    circuit: tuple
    ideal: np.ndarray


def _library():
    r = Rotation
    one_qubit = {
        "zero": ((), [1, 0]),
        "one": ((r("x", np.pi, 0),), [0, 1]),
        "plus": ((r("y", HALF_PI, 0),), [SQRT_HALF, SQRT_HALF]),
        "minus": ((r("x", HALF_PI, 0),), [SQRT_HALF, -1j * SQRT_HALF]),
    }
    two_qubit = {
        "s1": ((), [1, 0, 0, 0]),
        "s2": ((r("y", HALF_PI, 1),), [SQRT_HALF, SQRT_HALF, 0, 0]),
        "s3": ((r("y", HALF_PI, 0), r("y", -HALF_PI, 1), CZ(0, 1), r("y", HALF_PI, 1)),
               [SQRT_HALF, 0, 0, SQRT_HALF]),
        "s4": ((r("y", HALF_PI, 0), r("y", HALF_PI, 1), CZ(0, 1), r("y", HALF_PI, 1)),
               [0, SQRT_HALF, SQRT_HALF, 0]),
    }
    lib = {k: (1,) + v for k, v in one_qubit.items()}
    lib.update({k: (2,) + v for k, v in two_qubit.items()})
    return lib


STATE_LIBRARY = _library()
STATE_LABELS = tuple(STATE_LIBRARY)


def prepared_state(label: str, ideal=None, circuit=()) -> PreparedState:
    """Look up a named test state, or wrap a caller-supplied ``ideal`` as ``custom``."""
    if label == "custom":
        if ideal is None:
            raise UsageError("custom state needs an ideal density matrix")
        ideal = check_density_matrix(ideal, physical=True, atol=1e-9)
        return PreparedState("custom", n_qubits_of(ideal), tuple(circuit), ideal)
    try:
        n, circ, psi = STATE_LIBRARY[label]
    except KeyError:
        raise UsageError(f"unknown state label {label!r}; choose from {STATE_LABELS + ('custom',)}") from None
    return PreparedState(label, n, circ, pure_state(psi))


def polarize_register(n: int) -> np.ndarray:
    """Initial polarization: pump the electron, swap it onto each nucleus, re-pump.

    Nuclear spins start maximally mixed; the result is ``|0...0><0...0|``.
    """
    rho = np.kron(basis_state(0, 1), maximally_mixed(n - 1)) if n > 1 else basis_state(0, 1)
    for k in range(1, n):
        swap = _swap(0, k, n)
        rho = swap @ rho @ swap.conj().T
        reduced = np.trace(rho.reshape(2, 2**(n - 1), 2, 2**(n - 1)), axis1=0, axis2=2)
        rho = np.kron(basis_state(0, 1), reduced)
    return rho


def _swap(a: int, b: int, n: int) -> np.ndarray:
    dim = 2**n
    perm = np.zeros((dim, dim))
    for idx in range(dim):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        bits[a], bits[b] = bits[b], bits[a]
        perm[sum(bit << (n - 1 - q) for q, bit in enumerate(bits)), idx] = 1
    return perm.astype(complex)


def _apply_circuit(rho, circuit, p: DeviceParams, noise: NoiseParams | None, mode: str):
    if not circuit:
        return rho
    if mode == "circuit":
        from .planner import circuit_unitary
        u = circuit_unitary(circuit, p.n)
        return u @ rho @ u.conj().T
    seq, frames = compile_circuit(circuit, p)
    rho = run_sequence(rho, seq, p, noise)
    # express the state in the software frame; the frame rides into the next pulses
    f = frame_unitary(frames)
    return f.conj().T @ rho @ f


def _default_mode(p: DeviceParams) -> str:
    return "pulses" if p.n <= 2 else "circuit"


def prepare(state, p: DeviceParams, noise: NoiseParams | None = None, mode: str | None = None) -> np.ndarray:
    """Simulate preparation of a test state starting from the polarized register."""
    if isinstance(state, str):
        state = prepared_state(state)
    if state.n != p.n:
        raise UsageError(f"state {state.label!r} is a {state.n}-qubit state, device has n={p.n}")
    if state.label == "custom" and not state.circuit:
        return state.ideal.copy()
    rho = polarize_register(p.n)
    return _apply_circuit(rho, state.circuit, p, noise, mode or _default_mode(p))


@dataclass(frozen=True)
class Populations:
    """Electron populations inferred from a count rate.

    ``p_bright``/``p_dark`` are clipped to [0, 1] for reporting; the raw
    values are what reconstruction uses.
    """

    p_bright: float
    p_dark: float
    raw_bright: float
    raw_dark: float

    @property
    def clipped(self) -> bool:
        return self.raw_bright != self.p_bright or self.raw_dark != self.p_dark


def _check_calib(calib: ReadoutCalibration):
    if not calib.delta_r > 0:
        raise CalibrationError(f"delta_r must be positive, got {calib.delta_r}")


def extract_populations(record: MeasurementRecord, calib: ReadoutCalibration | None = None) -> Populations:
    calib = calib or record.calib
    _check_calib(calib)
    r = record.rate_estimate
    bright = (r - calib.r_min) / calib.delta_r
    dark = (calib.r_max - r) / calib.delta_r
    return Populations(float(np.clip(bright, 0, 1)), float(np.clip(dark, 0, 1)), bright, dark)


def extract_coefficient(record: MeasurementRecord, calib: ReadoutCalibration | None = None,
                        n: int | None = None) -> float:
    """``sign * ((r - r_min) / (2**(n-1) delta_r) - 1 / 2**n)`` for one setting."""
    calib = calib or record.calib
    _check_calib(calib)
    n = len(record.label) if n is None else n
    r = record.rate_estimate
    return record.sign * ((r - calib.r_min) / (2 ** (n - 1) * calib.delta_r) - 1.0 / 2**n)


@dataclass
class TomographyRun:
    n: int
    records: list
    calib: ReadoutCalibration
    shots_per_setting: int | None
    seed: int

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in self.records)

    @classmethod
    def from_records(cls, records, seed: int = 0) -> "TomographyRun":
        if not records:
            raise IncompleteRunError("no records")
        return cls(len(records[0].label), list(records), records[0].calib, records[0].shots, seed)

    @classmethod
    def from_jsonl(cls, text: str, seed: int = 0) -> "TomographyRun":
        records = [MeasurementRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
        return cls.from_records(records, seed)


def run_protocol(state, schedule=None, device: DeviceParams | None = None,
                 readout: ReadoutCalibration | None = None, shots: int | None = None, seed: int = 0, *,
                 calib: ReadoutCalibration | None = None, noise: NoiseParams | None = None,
                 mode: str | None = None) -> TomographyRun:
    """Simulate one tomography run.

    ``readout`` is the true count response of the device and ``calib`` the
    (possibly noisy) calibration stored with the records. ``shots=None``
    records exact expected rates instead of Poisson counts. ``state`` may be
    a label, a :class:`PreparedState` or an already prepared density matrix.
    """
    if readout is None:
        raise UsageError("run_protocol needs the readout response")
    calib = calib or readout
    _check_calib(calib)
    if isinstance(state, (str, PreparedState)):
        if device is None:
            raise UsageError("preparing a labelled state needs device parameters")
        rho0 = prepare(state, device, noise, mode)
    else:
        rho0 = check_density_matrix(state, atol=1e-9)
    n = n_qubits_of(rho0)
    device = device or DeviceParams(n=n)
    if device.n != n:
        raise UsageError(f"state has {n} qubits, device has n={device.n}")
    schedule = plan_full_schedule(n) if schedule is None else schedule
    mode = mode or _default_mode(device)
    records = []
    for index, plan in enumerate(schedule):
        if plan.n != n:
            raise UsageError(f"plan for {plan.target} does not match n={n}")
        # destructive readout: every setting starts from a fresh preparation of rho0
        rho = _apply_circuit(rho0, plan.circuit, device, noise, mode)
        if shots is None:
            rec = simulate_counts(rho, readout, 1, label=plan.target, sign=plan.sign,
                                  poisson=False, record_calib=calib)
        else:
            rng = derive_rng(seed, SETTINGS_STREAM, index)
            rec = simulate_counts(rho, readout, shots, rng, label=plan.target, sign=plan.sign,
                                  record_calib=calib)
        records.append(rec)
    return TomographyRun(n, records, calib, shots, seed)


def extract_decomposition(run: TomographyRun) -> PauliDecomposition:
    by_label = {}
    for rec in run.records:
        if rec.label in by_label:
            raise IncompleteRunError(f"setting {rec.label} measured twice")
        by_label[rec.label] = rec
    coeffs = {"E" * run.n: 1.0 / 2**run.n}
    for label in pauli_labels(run.n, include_identity=False):
        if label not in by_label:
            raise IncompleteRunError(f"run is missing setting {label}")
        coeffs[label] = extract_coefficient(by_label[label], run.calib, run.n)
    return PauliDecomposition(run.n, coeffs)


def reconstruct(run: TomographyRun) -> tuple[np.ndarray, np.ndarray]:
    """Raw (Hermitian, trace-1) and physically projected density matrices."""
    raw = recompose(extract_decomposition(run))
    return raw, project_physical(raw)
