"""Dense linear algebra on small qubit registers.

Qubit 0 is always the electron spin; qubits 1..n-1 are nuclear spins. A
Pauli label such as ``"ZE"`` therefore means ``Z (electron) (x) E (nucleus)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from itertools import product

import numpy as np

from .exceptions import UsageError
from .validation import EPS_MAT, PAULI_ALPHABET, check_label, check_square, check_unitary

E = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULIS = {"E": E, "X": X, "Y": Y, "Z": Z}
for _m in PAULIS.values():
    _m.setflags(write=False)


def tensor(factors) -> np.ndarray:
    """Kronecker product of a non-empty sequence of square matrices."""
    factors = list(factors)
    if not factors:
        raise UsageError("tensor() needs at least one factor")
    mats = [check_square(f, "factor") for f in factors]
    return reduce(np.kron, mats)


def pauli_matrix(label) -> np.ndarray:
    """Matrix of a Pauli product, e.g. ``pauli_matrix("XY") == kron(X, Y)``."""
    label = check_label(label)
    return tensor(PAULIS[s] for s in label)


def pauli_labels(n: int, include_identity: bool = True) -> list[str]:
    """All Pauli labels on ``n`` qubits in lexicographic E<X<Y<Z order."""
    labels = ["".join(p) for p in product(PAULI_ALPHABET, repeat=n)]
    if not include_identity:
        labels = labels[1:]
    return labels


def readout_label(n: int) -> str:
    """The directly observable product ``Z E ... E``."""
    return "Z" + "E" * (n - 1)


@dataclass(frozen=True)
class Rotation:
    """Rotation of one qubit about the x or y axis by ``angle`` radians."""

    axis: str
    angle: float
    target: int = 0

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise UsageError(f"rotation axis must be 'x' or 'y', got {self.axis!r}")
        if not (-2 * np.pi < self.angle <= 2 * np.pi):
            raise UsageError(f"rotation angle {self.angle} outside (-2pi, 2pi]")
        if self.target < 0:
            raise UsageError("rotation target must be a non-negative qubit index")

    @property
    def name(self) -> str:
        deg = np.degrees(self.angle)
        return f"{self.axis.upper()}{deg:.10g}"


def embed(op, target: int, n: int) -> np.ndarray:
    """Place a single-qubit operator on ``target`` of an ``n``-qubit register."""
    if not 0 <= target < n:
        raise UsageError(f"target qubit {target} out of range for {n} qubits")
    return tensor(op if q == target else E for q in range(n))


def rotation_matrix(r: Rotation, n: int = 1) -> np.ndarray:
    """``exp(-i angle/2 P_axis)`` on the target qubit, identity elsewhere."""
    p = X if r.axis == "x" else Y
    single = np.cos(r.angle / 2) * E - 1j * np.sin(r.angle / 2) * p
    return embed(single, r.target, n)


def phase_rotation(angle: float, phase: float) -> np.ndarray:
    """Single-qubit rotation about the equatorial axis ``cos(phase) X + sin(phase) Y``."""
    axis = np.cos(phase) * X + np.sin(phase) * Y
    return np.cos(angle / 2) * E - 1j * np.sin(angle / 2) * axis


def z_rotation(angle: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])


def cz_matrix(control: int, target: int, n: int) -> np.ndarray:
    """Controlled-phase gate between two qubits of an ``n``-qubit register."""
    if control == target or not (0 <= control < n and 0 <= target < n):
        raise UsageError(f"invalid CZ qubits ({control}, {target}) for {n} qubits")
    diag = np.ones(2**n, dtype=complex)
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control] and bits[target]:
            diag[idx] = -1
    return np.diag(diag)


def conjugate(u, a, atol: float = EPS_MAT) -> np.ndarray:
    """Return ``U A U^dagger``; ``u`` must be unitary to ``atol``."""
    u = check_unitary(u, atol=atol)
    a = check_square(a, "a")
    if a.shape != u.shape:
        raise UsageError(f"shape mismatch: u {u.shape} vs a {a.shape}")
    return u @ a @ u.conj().T


def allclose(a, b, atol: float = EPS_MAT) -> bool:
    return bool(np.allclose(a, b, rtol=0.0, atol=atol))
