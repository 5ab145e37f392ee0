"""Density matrices, Pauli-product decomposition and state scoring."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NumericError, UsageError, ValidationError
from .spin import pauli_labels, pauli_matrix
from .validation import EPS_MAT, check_density_matrix, check_label, check_square, n_qubits_of


@dataclass(frozen=True)
class PauliDecomposition:
    """Real coefficients ``c_P`` with ``rho = sum_P c_P P``.

    ``coeffs`` is keyed by Pauli label; missing labels are treated as zero
    except the identity, which is always ``1 / 2**n``.
    """

    n: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        for label, value in self.coeffs.items():
            check_label(label, self.n)
            if np.iscomplexobj(value) and abs(np.imag(value)) > EPS_MAT:
                raise ValidationError(f"coefficient of {label} is not real: {value}")

    def __getitem__(self, label) -> float:
        label = check_label(label, self.n)
        return float(np.real(self.coeffs.get(label, 0.0)))

    def as_vector(self) -> np.ndarray:
        """Coefficients in lexicographic label order (identity first)."""
        return np.array([self[label] for label in pauli_labels(self.n)])

    @classmethod
    def from_vector(cls, n: int, vec) -> "PauliDecomposition":
        vec = np.asarray(vec, dtype=float)
        labels = pauli_labels(n)
        if vec.shape != (len(labels),):
            raise UsageError(f"expected {len(labels)} coefficients, got shape {vec.shape}")
        return cls(n, dict(zip(labels, vec.tolist())))


def pure_state(psi) -> np.ndarray:
    """``|psi><psi|`` for a (not necessarily normalized) state vector."""
    psi = np.asarray(psi, dtype=complex).ravel()
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise UsageError("state vector is zero")
    psi = psi / norm
    return np.outer(psi, psi.conj())


def basis_state(index: int, n: int) -> np.ndarray:
    psi = np.zeros(2**n, dtype=complex)
    psi[index] = 1.0
    return pure_state(psi)


def maximally_mixed(n: int) -> np.ndarray:
    return np.eye(2**n, dtype=complex) / 2**n


def random_density_matrix(n: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Ginibre-distributed random state of the given rank (full rank by default)."""
    rng = np.random.default_rng(rng)
    dim = 2**n
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def decompose(rho) -> PauliDecomposition:
    """Pauli-product coefficients ``c_P = tr(rho P) / 2**n``."""
    rho = check_density_matrix(rho)
    n = n_qubits_of(rho)
    coeffs = {}
    for label in pauli_labels(n):
        coeffs[label] = float(np.real(np.trace(rho @ pauli_matrix(label)))) / 2**n
    coeffs["E" * n] = 1.0 / 2**n
    return PauliDecomposition(n, coeffs)


def recompose(d: PauliDecomposition) -> np.ndarray:
    """Sum ``c_P P``; the result is Hermitian with unit trace but may not be PSD."""
    ident = "E" * d.n
    if abs(d[ident] - 1.0 / 2**d.n) > EPS_MAT:
        raise ValidationError(f"identity coefficient is {d[ident]}, expected {1 / 2**d.n}")
    rho = np.zeros((2**d.n, 2**d.n), dtype=complex)
    for label in pauli_labels(d.n):
        c = d[label]
        if c:
            rho += c * pauli_matrix(label)
    return rho


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def fidelity(rho_th, rho_exp) -> float:
    """Normalized Hilbert-Schmidt overlap ``tr(a b) / sqrt(tr(a^2) tr(b^2))``.

    Applied as-is to raw reconstructions, so neither argument needs to be PSD.
    """
    a = check_density_matrix(rho_th, name="rho_th")
    b = check_density_matrix(rho_exp, name="rho_exp")
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch {a.shape} vs {b.shape}")
    denom = purity(a) * purity(b)
    if denom <= 0:
        raise NumericError("zero purity in fidelity denominator")
    return float(np.real(np.trace(a @ b)) / np.sqrt(denom))


def trace_distance(a, b) -> float:
    a = check_square(a, "a")
    b = check_square(b, "b")
    if a.shape != b.shape:
        raise UsageError(f"dimension mismatch {a.shape} vs {b.shape}")
    diff = a - b
    diff = (diff + diff.conj().T) / 2
    return float(0.5 * np.abs(np.linalg.eigvalsh(diff)).sum())


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(v - tau, 0.0)


def project_physical(rho_raw) -> np.ndarray:
    """Closest trace-1 PSD matrix in Frobenius norm.

    The spectrum is projected onto the probability simplex while keeping
    the eigenbasis. Physical inputs are returned unchanged.
    """
    rho = check_density_matrix(rho_raw, name="rho_raw")
    rho = (rho + rho.conj().T) / 2
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() >= 0:
        return rho.copy()
    new = project_simplex(vals)
    out = (vecs * new) @ vecs.conj().T
    return (out + out.conj().T) / 2


def imag_rms(rho) -> float:
    """Root-mean-square of the imaginary parts over all matrix entries."""
    return float(np.sqrt(np.mean(np.imag(np.asarray(rho)) ** 2)))
