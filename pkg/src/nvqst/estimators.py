"""scikit-learn style wrappers around the reconstruction and fitting routines."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .device import ReadoutCalibration
from .exceptions import UsageError
from .ramsey import FidTrace, fit_fringe
from .states import fidelity, imag_rms, project_physical, recompose, trace_distance
from .tomography import TomographyRun, extract_decomposition


class TimeIndependentTomography(BaseEstimator):
    """Reconstruct a density matrix from one measurement record per Pauli product.

    Parameters
    ----------
    n_qubits : int or None
        Expected register size; ``None`` takes it from the records.
    project : bool
        If True, ``density_matrix_`` is the physical projection of the raw
        reconstruction; the raw matrix is always kept in ``density_matrix_raw_``.

    Attributes
    ----------
    coefficients_ : PauliDecomposition
    density_matrix_raw_, density_matrix_physical_, density_matrix_ : ndarray
    n_qubits_ : int
    """

    def __init__(self, n_qubits=None, project=True):
        self.n_qubits = n_qubits
        self.project = project

    def fit(self, X, y=None):
        run = X if isinstance(X, TomographyRun) else TomographyRun.from_records(list(X))
        if self.n_qubits is not None and run.n != self.n_qubits:
            raise UsageError(f"records are for {run.n} qubits, estimator expects {self.n_qubits}")
        self.coefficients_ = extract_decomposition(run)
        self.density_matrix_raw_ = recompose(self.coefficients_)
        self.density_matrix_physical_ = project_physical(self.density_matrix_raw_)
        self.density_matrix_ = self.density_matrix_physical_ if self.project else self.density_matrix_raw_
        self.n_qubits_ = run.n
        return self

    def score(self, rho_ideal, y=None):
        """Fidelity of the fitted state against ``rho_ideal``."""
        check_is_fitted(self, "density_matrix_")
        return fidelity(rho_ideal, self.density_matrix_)

    def report(self, rho_ideal=None) -> dict:
        check_is_fitted(self, "density_matrix_")
        out = {"imag_rms": imag_rms(self.density_matrix_raw_),
               "min_eigenvalue_raw": float(np.linalg.eigvalsh(self.density_matrix_raw_).min())}
        if rho_ideal is not None:
            out["fidelity_raw"] = fidelity(rho_ideal, self.density_matrix_raw_)
            out["fidelity_physical"] = fidelity(rho_ideal, self.density_matrix_physical_)
            out["trace_distance_raw"] = trace_distance(rho_ideal, self.density_matrix_raw_)
        return out


class PhysicalProjector(TransformerMixin, BaseEstimator):
    """Map raw Hermitian trace-1 matrices onto the nearest physical states.

    Stateless: ``fit`` only records the matrix dimension. ``transform``
    accepts one ``(d, d)`` matrix or a stack ``(k, d, d)``.
    """

    def fit(self, X, y=None):
        X = np.asarray(X)
        self.dim_ = X.shape[-1]
        return self

    def transform(self, X):
        check_is_fitted(self, "dim_")
        X = np.asarray(X, dtype=complex)
        if X.shape[-1] != self.dim_:
            raise UsageError(f"expected dimension {self.dim_}, got {X.shape[-1]}")
        if X.ndim == 2:
            return project_physical(X)
        return np.stack([project_physical(m) for m in X])


class RamseyFringeEstimator(BaseEstimator):
    """Known-frequency fringe fit returning the transverse Pauli coefficients."""

    def __init__(self, detuning=1e6, t2_star=None):
        self.detuning = detuning
        self.t2_star = t2_star

    def fit(self, times, rates, calibration: ReadoutCalibration = None, shots=None):
        if calibration is None:
            raise UsageError("RamseyFringeEstimator.fit needs a ReadoutCalibration")
        trace = FidTrace(np.asarray(times, float), np.asarray(rates, float), self.detuning, shots)
        fit = fit_fringe(trace, calibration, self.t2_star)
        self.offset_, self.cos_amp_, self.sin_amp_ = fit.offset, fit.cos_amp, fit.sin_amp
        self.c_x_, self.c_y_ = fit.c_x, fit.c_y
        self.c_x_err_, self.c_y_err_ = fit.c_x_err, fit.c_y_err
        return self

    def predict(self, times):
        check_is_fitted(self, "offset_")
        t = np.asarray(times, float)
        env = 1.0 if self.t2_star is None else np.exp(-(t / self.t2_star) ** 2)
        w = 2 * np.pi * self.detuning * t
        return self.offset_ + env * (self.cos_amp_ * np.cos(w) + self.sin_amp_ * np.sin(w))
