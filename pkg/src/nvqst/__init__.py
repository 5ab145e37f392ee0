"""Fast time-independent quantum state tomography for NV-center spin registers."""

__version__ = "0.1.0"

from .device import (DeviceParams, MeasurementRecord, NoiseParams, ReadoutCalibration, calibrate,
                     expected_rate, simulate_counts)
from .estimators import PhysicalProjector, RamseyFringeEstimator, TimeIndependentTomography
from .planner import ConversionPlan, plan_conversion, plan_full_schedule, verify_plan
from .spin import Rotation, conjugate, pauli_matrix, rotation_matrix, tensor
from .states import decompose, fidelity, project_physical, recompose, trace_distance
from .tomography import prepare, prepared_state, reconstruct, run_protocol

__all__ = [
    "ConversionPlan", "DeviceParams", "MeasurementRecord", "NoiseParams", "PhysicalProjector",
    "RamseyFringeEstimator", "ReadoutCalibration", "Rotation", "TimeIndependentTomography",
    "calibrate", "conjugate", "decompose", "expected_rate", "fidelity", "pauli_matrix",
    "plan_conversion", "plan_full_schedule", "prepare", "prepared_state", "project_physical",
    "recompose", "reconstruct", "rotation_matrix", "run_protocol", "simulate_counts", "tensor",
    "trace_distance", "verify_plan",
]
