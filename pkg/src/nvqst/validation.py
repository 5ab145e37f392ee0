"""Input validation helpers.

These play the role of ``sklearn.utils.validation`` for the objects this
package works with: Pauli labels, square complex matrices and density
matrices. Each helper returns a normalized copy of its input or raises.
"""

from __future__ import annotations

import numpy as np

from .exceptions import UsageError, ValidationError

#: Absolute tolerance for exact-math matrix comparisons.
EPS_MAT = 1e-12
#: Smallest eigenvalue still accepted as positive semidefinite.
EPS_PSD = 1e-9

PAULI_ALPHABET = "EXYZ"


def check_label(label, n: int | None = None) -> str:
    """Normalize a Pauli label (``"XZ"``, ``["X", "Z"]``) to an upper-case string."""
    if not isinstance(label, str):
        try:
            label = "".join(label)
        except TypeError as exc:
            raise UsageError(f"cannot interpret {label!r} as a Pauli label") from exc
    label = label.upper()
    if not label:
        raise UsageError("Pauli label must contain at least one qubit")
    bad = set(label) - set(PAULI_ALPHABET)
    if bad:
        raise UsageError(f"Pauli label {label!r} contains invalid symbols {sorted(bad)}")
    if n is not None and len(label) != n:
        raise UsageError(f"Pauli label {label!r} has length {len(label)}, expected {n}")
    return label


def check_n_qubits(n, allowed=(1, 2, 3)) -> int:
    if isinstance(n, bool) or int(n) != n:
        raise UsageError(f"qubit count must be an integer, got {n!r}")
    n = int(n)
    if n not in allowed:
        raise UsageError(f"qubit count {n} not in supported set {tuple(allowed)}")
    return n


def check_square(a, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def is_hermitian(a, atol: float = EPS_MAT) -> bool:
    a = np.asarray(a)
    return bool(np.allclose(a, a.conj().T, rtol=0.0, atol=atol))


def is_unitary(u, atol: float = EPS_MAT) -> bool:
    u = np.asarray(u)
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), rtol=0.0, atol=atol))


def check_unitary(u, name: str = "u", atol: float = EPS_MAT) -> np.ndarray:
    u = check_square(u, name)
    if not is_unitary(u, atol):
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        raise ValidationError(f"{name} is not unitary (max |U^dag U - I| = {err:.3e})")
    return u


def n_qubits_of(a) -> int:
    """Return n such that the matrix has dimension 2**n."""
    dim = np.asarray(a).shape[0]
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return n


def check_density_matrix(rho, *, physical: bool = False, atol: float = EPS_MAT,
                         name: str = "rho") -> np.ndarray:
    """Validate a density matrix on a qubit register.

    A raw reconstruction only has to be Hermitian with unit trace. With
    ``physical=True`` the spectrum must also be non-negative to ``EPS_PSD``.
    """
    rho = check_square(rho, name)
    n_qubits_of(rho)
    if not is_hermitian(rho, atol):
        raise ValidationError(f"{name} is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > max(atol, 1e-10):
        raise ValidationError(f"{name} has trace {tr.real:.12g}, expected 1")
    if physical:
        lo = np.linalg.eigvalsh(rho).min()
        if lo < -EPS_PSD:
            raise ValidationError(f"{name} is not positive semidefinite (min eigenvalue {lo:.3e})")
    return rho
