"""Conversion circuits that steer every Pauli product onto the readout observable.

For a target product ``P`` a plan is a short Clifford circuit ``U`` with
``U P U^dagger = sign * Z E ... E``. After applying ``U`` the coefficient of
``P`` is simply (``sign`` times) the electron population difference.

Plans are found by breadth-first search over signed Pauli products using
gate action tables derived from the gate matrices, so the returned
circuit is the shortest one in the gate set (ties broken by gate order).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .device import Delay, DeviceParams, Pulse, PulseSequence, pulse_duration, qubit_hamiltonian
from .exceptions import CompilationError, UsageError
from .spin import (PAULIS, Rotation, cz_matrix, pauli_labels, pauli_matrix,
                   readout_label, rotation_matrix, tensor, z_rotation)
from .validation import check_label, check_n_qubits

# Shortest circuits need 6 gates at n <= 2 (EZ) and 7 at n = 3 (EXX, EXY, EYX, EYY, EZZ)
# when entangling gates are restricted to electron-nuclear CZ.
DEFAULT_MAX_GATES = {1: 6, 2: 6, 3: 7}
ACCEPT_FIDELITY = 0.99
MAX_SEQUENCE_DURATION = 15e-6

HALF_PI = np.pi / 2


@dataclass(frozen=True)
class CZ:
    """Controlled phase between the electron (``control``) and nuclear qubit ``target``."""

    control: int = 0
    target: int = 1

    @property
    def name(self) -> str:
        return "CZ"


def gate_matrix(gate, n: int) -> np.ndarray:
    if isinstance(gate, CZ):
        return cz_matrix(gate.control, gate.target, n)
    return rotation_matrix(gate, n)


def circuit_unitary(circuit, n: int) -> np.ndarray:
    """Product ``G_k ... G_1`` of a circuit applied left to right."""
    u = np.eye(2**n, dtype=complex)
    for gate in circuit:
        u = gate_matrix(gate, n) @ u
    return u


def gate_to_dict(gate) -> dict:
    if isinstance(gate, CZ):
        return {"gate": "CZ", "qubits": [gate.control, gate.target]}
    return {"gate": gate.name, "qubit": gate.target}


def gate_from_dict(d: dict):
    if d["gate"] == "CZ":
        return CZ(*d["qubits"])
    axis = d["gate"][0].lower()
    return Rotation(axis, float(np.radians(float(d["gate"][1:]))), int(d["qubit"]))


@dataclass(frozen=True, eq=False)
class ConversionPlan:
    target: str
    circuit: tuple
    sign: int
    unitary: np.ndarray

    @classmethod
    def from_circuit(cls, target, circuit, sign) -> "ConversionPlan":
        target = check_label(target)
        circuit = tuple(circuit)
        return cls(target, circuit, int(sign), circuit_unitary(circuit, len(target)))

    @property
    def n(self) -> int:
        return len(self.target)

    def to_dict(self) -> dict:
        return {"label": self.target, "sign": self.sign,
                "gates": [gate_to_dict(g) for g in self.circuit]}

    @classmethod
    def from_dict(cls, d) -> "ConversionPlan":
        return cls.from_circuit(d["label"], [gate_from_dict(g) for g in d["gates"]], d["sign"])


# --- gate action tables ---------------------------------------------------------

def _signed_pauli(m: np.ndarray, labels) -> tuple[int, str]:
    dim = m.shape[0]
    for label in labels:
        c = np.trace(pauli_matrix(label) @ m) / dim
        if abs(abs(c) - 1) < 1e-9:
            return int(round(c.real)), label
    raise AssertionError("gate is not a Clifford on this Pauli")


def _single_gate_set():
    return [("x", HALF_PI), ("y", HALF_PI), ("x", np.pi), ("y", np.pi)]


@lru_cache(maxsize=None)
def _single_table(axis: str, angle: float) -> dict:
    g = rotation_matrix(Rotation(axis, angle, 0), 1)
    return {p: _signed_pauli(g @ PAULIS[p] @ g.conj().T, "EXYZ") for p in "EXYZ"}


@lru_cache(maxsize=None)
def _cz_table() -> dict:
    g = cz_matrix(0, 1, 2)
    pairs = pauli_labels(2)
    return {ab: _signed_pauli(g @ pauli_matrix(ab) @ g.conj().T, pairs) for ab in pairs}


def _apply_gate(gate, label: str) -> tuple[int, str]:
    chars = list(label)
    if isinstance(gate, CZ):
        s, ab = _cz_table()[label[gate.control] + label[gate.target]]
        chars[gate.control], chars[gate.target] = ab
        return s, "".join(chars)
    s, q = _single_table(gate.axis, gate.angle)[label[gate.target]]
    chars[gate.target] = q
    return s, "".join(chars)


def _gate_set(n: int) -> list:
    gates = [Rotation(axis, angle, q) for q in range(n) for axis, angle in _single_gate_set()]
    gates += [CZ(0, k) for k in range(1, n)]
    return gates


@lru_cache(maxsize=None)
def _search(target: str, max_gates: int):
    n = len(target)
    goal = readout_label(n)
    gates = _gate_set(n)
    seen = {target}
    queue = deque([(target, 1, ())])
    while queue:
        label, sign, circuit = queue.popleft()
        if label == goal:
            return circuit, sign
        if len(circuit) == max_gates:
            continue
        for gate in gates:
            s, nxt = _apply_gate(gate, label)
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, sign * s, circuit + (gate,)))
    return None


def plan_conversion(target, max_gates: int | None = None) -> ConversionPlan:
    """Shortest signed conversion circuit for a non-identity Pauli product."""
    target = check_label(target)
    n = check_n_qubits(len(target))
    if max_gates is None:
        max_gates = DEFAULT_MAX_GATES[n]
    if set(target) == {"E"}:
        raise UsageError("the identity has a fixed coefficient and needs no conversion")
    found = _search(target, max_gates)
    if found is None:
        raise UsageError(f"no conversion for {target} within {max_gates} gates")
    circuit, sign = found
    return ConversionPlan.from_circuit(target, circuit, sign)


def plan_full_schedule(n: int, max_gates: int | None = None) -> list[ConversionPlan]:
    """One plan per non-identity label, in lexicographic E<X<Y<Z order (``4**n - 1`` plans)."""
    n = check_n_qubits(n)
    return [plan_conversion(label, max_gates) for label in pauli_labels(n, include_identity=False)]


def verify_plan(plan: ConversionPlan) -> float:
    """Signed overlap ``tr(Z E..E  U P U^dagger) * sign / 2**n``; 1.0 for a correct plan."""
    n = plan.n
    u = plan.unitary
    moved = u @ pauli_matrix(plan.target) @ u.conj().T
    return float(np.real(np.trace(pauli_matrix(readout_label(n)) @ moved)) * plan.sign / 2**n)


def schedule_to_json(plans) -> str:
    return json.dumps([dict(p.to_dict(), verification=verify_plan(p)) for p in plans], indent=2)


# --- pulse compilation ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PulseCompilation:
    plan: ConversionPlan
    sequence: PulseSequence
    conversion_fidelity: float

    @property
    def accepted(self) -> bool:
        return self.conversion_fidelity >= ACCEPT_FIDELITY

    def to_dict(self) -> dict:
        return {"label": self.plan.target, "sign": self.plan.sign,
                "n_pulses": self.sequence.n_pulses, "n_delays": self.sequence.n_delays,
                "total_duration": self.sequence.total_duration,
                "conversion_fidelity": self.conversion_fidelity, "accepted": self.accepted}


def frame_unitary(frames) -> np.ndarray:
    """Pending virtual Z rotations, one angle per qubit."""
    return tensor(z_rotation(theta) for theta in frames)


def compile_circuit(circuit, p: DeviceParams):
    """Translate a gate circuit into pulses and delays with virtual-Z frame tracking.

    Rotations become resonant pulses whose phase absorbs the pending frame.
    ``CZ`` becomes a hyperfine free-precession interval of ``1 / (2 A)``;
    the accompanying local Z phases are pushed into the frame. Returns the
    sequence and the final frame angles; the frame commutes with the
    readout observable, and the physical state equals
    ``F ideal F^dagger`` with ``F = frame_unitary(frames)``.
    """
    n = p.n
    frames = [0.0] * n
    steps = []
    for gate in circuit:
        if isinstance(gate, CZ):
            if n != 2:
                raise CompilationError(f"CZ compilation needs n=2 (got n={n}); offending gate: CZ{gate.control}{gate.target}")
            a = p.couplings[gate.target - 1]
            if a == 0:
                raise CompilationError("CZ needs a non-zero hyperfine coupling; offending gate: CZ")
            t = 1.0 / (2 * abs(a))
            d = np.exp(-1j * np.real(np.diag(qubit_hamiltonian(p))) * t)
            r = d * np.diag(cz_matrix(gate.control, gate.target, n)).conj()
            r = r / r[0]
            if abs(r[3] - r[1] * r[2]) > 1e-9:
                raise CompilationError("free precession does not realize CZ up to local phases")
            frames[0] += float(np.angle(r[2]))
            frames[1] += float(np.angle(r[1]))
            steps.append(Delay(t))
            continue
        if gate.target >= n:
            raise CompilationError(f"gate {gate.name} on qubit {gate.target} outside register")
        if gate.target > 0 and p.nuclear_rabi_freq is None:
            raise CompilationError(f"nuclear driving disabled; offending gate: {gate.name} on qubit {gate.target}")
        phase = (0.0 if gate.axis == "x" else HALF_PI) + frames[gate.target]
        steps.append(Pulse(gate.target, gate.angle, float(np.mod(phase, 2 * np.pi)),
                           pulse_duration(gate.angle, gate.target, p)))
    return PulseSequence(tuple(steps)), tuple(frames)


def sequence_unitary(seq: PulseSequence, p: DeviceParams, ideal: bool | None = None) -> np.ndarray:
    from .device import pulse_unitary

    u = np.eye(2**p.n, dtype=complex)
    for step in seq.steps:
        if isinstance(step, Delay):
            u = np.diag(np.exp(-1j * np.real(np.diag(qubit_hamiltonian(p))) * step.duration)) @ u
        else:
            u = pulse_unitary(step, p, ideal) @ u
    return u


def compile_to_pulses(plan: ConversionPlan, p: DeviceParams, ideal: bool | None = None,
                      max_duration: float = MAX_SEQUENCE_DURATION) -> PulseCompilation:
    """Compile a plan for the device and score how well the sequence converts its target."""
    if plan.n != p.n:
        raise UsageError(f"plan is for {plan.n} qubits, device has {p.n}")
    seq, _ = compile_circuit(plan.circuit, p)
    if seq.total_duration > max_duration:
        raise CompilationError(
            f"sequence for {plan.target} lasts {seq.total_duration:.3e} s > {max_duration:.1e} s")
    u = sequence_unitary(seq, p, ideal)
    moved = u @ pauli_matrix(plan.target) @ u.conj().T
    score = float(np.real(np.trace(pauli_matrix(readout_label(p.n)) @ moved))) * plan.sign / 2**p.n
    return PulseCompilation(plan, seq, float(np.clip(score, -1.0, 1.0)))
