"""Experiment configuration: one strict JSON document.

Unknown keys and wrongly typed values are rejected with the dotted path of
the offending field (or the line/column for malformed JSON).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np
from pydantic import TypeAdapter
from pydantic import ValidationError as PydanticValidationError

from .device import DeviceParams, NoiseParams
from .exceptions import ConfigError, UsageError

_STRICT = {"extra": "forbid", "strict": True}


@dataclass(frozen=True)
class CalibrationConfig:
    """True readout response and the shot count of the calibration measurement.

    ``shots=None`` means the calibration is exact.
    """

    r_max: float = 0.03
    r_min: float = 0.021
    shots: int | None = 20_000_000


@dataclass(frozen=True)
class TomographyConfig:
    state: str = "plus"
    shots_per_setting: int | None = 5_000_000
    seed: int = 0
    projection: bool = False

    def __post_init__(self):
        if self.shots_per_setting is not None and self.shots_per_setting < 1:
            raise UsageError("shots_per_setting must be >= 1 or null")
        if self.seed < 0:
            raise UsageError("seed must be non-negative")


@dataclass(frozen=True)
class RamseyConfig:
    detuning: float = 2.0e6
    N_t: int = 200
    N_fid: int | None = None
    t_max: float = 2.0e-6

    def __post_init__(self):
        if self.N_t < 2 or self.t_max <= 0:
            raise UsageError("need N_t >= 2 and t_max > 0")
        if self.N_fid is not None and self.N_fid < 1:
            raise UsageError("N_fid must be >= 1")
        if self.detuning and not self.t_max / self.N_t < 1 / (2 * abs(self.detuning)):
            raise UsageError("delay spacing t_max / N_t violates Nyquist for the detuning")

    def times(self) -> np.ndarray:
        return np.arange(self.N_t) * (self.t_max / self.N_t)


@dataclass(frozen=True)
class ExperimentConfig:
    device: DeviceParams = field(default_factory=DeviceParams)
    noise: NoiseParams = field(default_factory=NoiseParams)
    calibration: CalibrationConfig = field(default_factory=CalibrationConfig)
    tomography: TomographyConfig = field(default_factory=TomographyConfig)
    ramsey: RamseyConfig = field(default_factory=RamseyConfig)

    def to_dict(self) -> dict:
        return _ADAPTER.dump_python(self, mode="json")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


for _cls in (DeviceParams, NoiseParams, CalibrationConfig, TomographyConfig, RamseyConfig, ExperimentConfig):
    _cls.__pydantic_config__ = _STRICT

_ADAPTER = TypeAdapter(ExperimentConfig)


def _format_errors(exc: PydanticValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(x) for x in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def _check_consistency(cfg: ExperimentConfig) -> ExperimentConfig:
    from .tomography import STATE_LIBRARY

    label = cfg.tomography.state
    if label not in STATE_LIBRARY:
        raise ConfigError(f"tomography.state: unknown state {label!r}; choose from {sorted(STATE_LIBRARY)}")
    n_state = STATE_LIBRARY[label][0]
    if n_state != cfg.device.n:
        raise ConfigError(f"tomography.state: {label!r} is a {n_state}-qubit state but device.n = {cfg.device.n}")
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    try:
        cfg = _ADAPTER.validate_json(text)
    except PydanticValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None
    return _check_consistency(cfg)


def load_config(path=None) -> ExperimentConfig:
    """Read a config file; ``None`` gives the defaults."""
    if path is None:
        return _check_consistency(ExperimentConfig())
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def with_overrides(cfg: ExperimentConfig, state: str | None = None, seed: int | None = None) -> ExperimentConfig:
    """Apply command-line overrides; a ``state`` override also adopts that state's qubit count."""
    from .tomography import STATE_LIBRARY

    tomo = cfg.tomography
    device = cfg.device
    if state is not None:
        if state not in STATE_LIBRARY:
            raise ConfigError(f"--state: unknown state {state!r}; choose from {sorted(STATE_LIBRARY)}")
        tomo = replace(tomo, state=state)
        n = STATE_LIBRARY[state][0]
        if n != device.n:
            try:
                device = replace(device, n=n)
            except UsageError as exc:
                raise ConfigError(f"device: {exc}") from None
    if seed is not None:
        if seed < 0 or seed >= 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        tomo = replace(tomo, seed=seed)
    return _check_consistency(replace(cfg, device=device, tomography=tomo))
