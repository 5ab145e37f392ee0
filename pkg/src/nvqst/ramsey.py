"""Ramsey (free-induction-decay) tomography baseline and measurement budgets.

The electron precesses under a known detuning for a grid of delays, an
X_90 projection pulse turns the coherence into population, and the fringe
is fitted with ``a + b cos(2 pi f t) + c sin(2 pi f t)``. With the
conventions used here the rate is

    r(t) = r_min + delta_r * (1/2 + c_X sin(2 pi f t) + c_Y cos(2 pi f t))

so ``c_X = c / delta_r`` and ``c_Y = b / delta_r``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass

import numpy as np

from .device import (DeviceParams, NoiseParams, ReadoutCalibration, apply_pulse, derive_rng,
                     expected_rate, free_evolve)
from .exceptions import FitError, UsageError
from .spin import Rotation



def default_n_fid(n: int) -> int:
    """Series needed when every fringe fit yields one cos/sin coefficient pair.

    The ``4**n - 2**n`` coherence coefficients take one fringe per pair and
    each of the ``2**n - 1`` diagonal coefficients one population series.
    """
    return (4**n - 2**n) // 2 + 2**n - 1


@dataclass(frozen=True, eq=False)
class FidTrace:
    times: np.ndarray
    rates: np.ndarray
    detuning: float
    shots: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_seconds", "rate", "shots"])
        for t, r in zip(self.times, self.rates):
            w.writerow([repr(float(t)), repr(float(r)), "" if self.shots is None else self.shots])
        return buf.getvalue()


def _check_grid(times, detuning):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise UsageError("need at least two delay times")
    steps = np.diff(times)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise UsageError("delay grid must be uniform and increasing")
    if detuning and not steps[0] < 1 / (2 * abs(detuning)):
        raise UsageError(f"grid spacing {steps[0]:.3e} s violates Nyquist for detuning {detuning} Hz")
    return times


def simulate_fid(state, detuning: float, times, device: DeviceParams, calib: ReadoutCalibration,
                 shots: int | None = None, seed=0, noise: NoiseParams | None = None,
                 projection: bool = True) -> FidTrace:
    """Rates after free precession for each delay followed by an X_90 projection.

    ``projection=False`` skips the X_90 and reads the population directly,
    which is how the diagonal coefficient is obtained in this baseline.
    """
    times = _check_grid(times, detuning)
    state = np.asarray(state, dtype=complex)
    pulse = Rotation("x", np.pi / 2, 0)
    rates = np.empty(times.size)
    for i, t in enumerate(times):
        rho = free_evolve(state, float(t), device, noise, detuning=detuning)
        if projection:
            rho = apply_pulse(rho, pulse, device, ideal=True)
        rate = expected_rate(rho, calib)
        if shots is not None:
            rate = derive_rng(seed, i).poisson(shots * max(rate, 0.0)) / shots
        rates[i] = rate
    return FidTrace(times, rates, float(detuning), shots)


@dataclass(frozen=True)
class FringeFit:
    offset: float
    cos_amp: float
    sin_amp: float
    c_x: float
    c_y: float
    c_x_err: float
    c_y_err: float


def fit_fringe(trace: FidTrace, calib: ReadoutCalibration, t2_star: float | None = None) -> FringeFit:
    """Least-squares fit at the known detuning.

    If ``t2_star`` is given, the oscillating columns carry the Gaussian
    envelope ``exp(-(t/T2*)^2)``. Standard errors use Poisson point
    variances when the trace has a shot count, else they are zero.
    """
    t = np.asarray(trace.times, dtype=float)
    f = trace.detuning
    if t.size < 8:
        raise FitError(f"need at least 8 points, got {t.size}")
    if f == 0 or (t[-1] - t[0]) * abs(f) < 1:
        raise FitError("trace must span at least one oscillation period at non-zero detuning")
    env = np.ones_like(t) if t2_star is None else np.exp(-(t / t2_star) ** 2)
    w = 2 * np.pi * f * t
    design = np.column_stack([np.ones_like(t), env * np.cos(w), env * np.sin(w)])
    if np.linalg.matrix_rank(design) < 3:
        raise FitError("rank-deficient fringe design matrix")
    y = np.asarray(trace.rates, dtype=float)
    if trace.shots is not None:
        var = np.maximum(y, 1e-300) / trace.shots
        wts = 1 / np.sqrt(var)
        coef, *_ = np.linalg.lstsq(design * wts[:, None], y * wts, rcond=None)
        cov = np.linalg.inv((design * wts[:, None] ** 2).T @ design)
        err = np.sqrt(np.diag(cov))
    else:
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        err = np.zeros(3)
    a, b, c = coef
    dr = calib.delta_r
    return FringeFit(float(a), float(b), float(c), float(c / dr), float(b / dr),
                     float(err[2] / dr), float(err[1] / dr))


def fit_quadratures(trace: FidTrace, calib: ReadoutCalibration, t2_star: float | None = None):
    """``(c_X, c_Y)`` recovered from a Ramsey fringe."""
    fit = fit_fringe(trace, calib, t2_star)
    return fit.c_x, fit.c_y


def dominant_frequency(trace: FidTrace) -> float:
    """Peak of the FFT magnitude of the mean-subtracted trace (Hz)."""
    y = np.asarray(trace.rates) - np.mean(trace.rates)
    dt = trace.times[1] - trace.times[0]
    spectrum = np.abs(np.fft.rfft(y))
    freqs = np.fft.rfftfreq(y.size, dt)
    return float(freqs[1:][np.argmax(spectrum[1:])])


@dataclass(frozen=True)
class BudgetReport:
    n: int
    N_t: int
    N_fid: int
    settings_fast: int
    settings_ramsey: int
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def budget(n: int, N_t: int, N_fid: int | None = None) -> BudgetReport:
    """Settings needed by the time-independent scheme versus a Ramsey scheme."""
    if n < 1:
        raise UsageError("n must be >= 1")
    if N_fid is None:
        N_fid = default_n_fid(n)
    if min(N_t, N_fid) < 1:
        raise UsageError("n, N_t and N_fid must all be >= 1")
    fast = 4**n - 1
    ramsey = N_fid * N_t
    return BudgetReport(n, N_t, N_fid, fast, ramsey, ramsey / fast)
