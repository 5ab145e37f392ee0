import json

import numpy as np
import pytest

from nvqst.device import DeviceParams, Delay, Pulse
from nvqst.exceptions import CompilationError, UsageError
from nvqst.planner import (ConversionPlan, compile_to_pulses, plan_conversion, plan_full_schedule,
                           schedule_to_json, verify_plan)
from nvqst.spin import Rotation, pauli_labels, pauli_matrix, readout_label
from nvqst.validation import EPS_MAT


def conjugation_oracle(plan):
    """Apply the circuit gate by gate to the target operator and compare with +-Z E..E."""
    from nvqst.planner import gate_matrix
    m = pauli_matrix(plan.target)
    for gate in plan.circuit:
        g = gate_matrix(gate, plan.n)
        m = g @ m @ g.conj().T
    return m


def test_single_qubit_plans():
    z, x, y = plan_conversion("Z"), plan_conversion("X"), plan_conversion("Y")
    assert z.circuit == () and z.sign == 1
    assert x.circuit == (Rotation("y", np.pi / 2, 0),) and x.sign == -1
    assert y.circuit == (Rotation("x", np.pi / 2, 0),) and y.sign == 1


def test_identity_target_rejected():
    with pytest.raises(UsageError):
        plan_conversion("EE")


@pytest.mark.parametrize("n, count", [(1, 3), (2, 15), (3, 63)])
def test_full_schedule(n, count):
    plans = plan_full_schedule(n)
    assert len(plans) == count
    assert [p.target for p in plans] == pauli_labels(n, include_identity=False)
    goal = pauli_matrix(readout_label(n))
    for plan in plans:
        moved = conjugation_oracle(plan)
        assert np.max(np.abs(moved - plan.sign * goal)) < EPS_MAT
        assert abs(verify_plan(plan) - 1.0) < EPS_MAT


def test_xx_plan_by_oracle():
    plan = plan_conversion("XX")
    assert np.allclose(conjugation_oracle(plan), plan.sign * pauli_matrix("ZE"), atol=EPS_MAT)


def test_schedule_is_deterministic():
    a, b = plan_full_schedule(2), plan_full_schedule(2)
    for pa, pb in zip(a, b):
        assert pa.circuit == pb.circuit and pa.sign == pb.sign
        assert np.array_equal(pa.unitary, pb.unitary)


def test_circuit_lengths():
    assert max(len(p.circuit) for n in (1, 2) for p in plan_full_schedule(n)) <= 6
    assert max(len(p.circuit) for p in plan_full_schedule(3)) <= 7


@pytest.mark.parametrize("label", ["EXX", "EXY", "EYX", "EYY", "EZZ"])
def test_three_qubit_minimum_exceeds_six_gates(label):
    # breadth-first search is exhaustive: no circuit of <= 6 gates exists for these targets
    with pytest.raises(UsageError):
        plan_conversion(label, max_gates=6)
    assert len(plan_conversion(label, max_gates=7).circuit) == 7


def test_verify_sign_flip_and_mutation():
    plan = plan_conversion("XY")
    assert verify_plan(plan) == pytest.approx(1.0, abs=EPS_MAT)
    flipped = ConversionPlan.from_circuit(plan.target, plan.circuit, -plan.sign)
    assert verify_plan(flipped) == pytest.approx(-1.0, abs=EPS_MAT)
    for drop in range(len(plan.circuit)):
        mutated = plan.circuit[:drop] + plan.circuit[drop + 1:]
        assert verify_plan(ConversionPlan.from_circuit(plan.target, mutated, plan.sign)) < 1 - 1e-6


def test_plan_json_round_trip():
    plans = plan_full_schedule(2)
    doc = json.loads(schedule_to_json(plans))
    assert len(doc) == 15
    for entry, plan in zip(doc, plans):
        back = ConversionPlan.from_dict(entry)
        assert back.circuit == plan.circuit and back.sign == plan.sign
        assert entry["verification"] == pytest.approx(1.0, abs=EPS_MAT)


def test_compile_trivial_and_single_pulse(device2):
    ze = compile_to_pulses(plan_conversion("ZE"), device2)
    assert ze.sequence.steps == () and ze.conversion_fidelity == 1.0
    ye = compile_to_pulses(plan_conversion("YE"), device2)
    (step,) = ye.sequence.steps
    assert isinstance(step, Pulse) and step.target == 0
    assert step.duration == pytest.approx(0.25 / device2.rabi_freq)
    assert ye.conversion_fidelity == pytest.approx(1.0, abs=1e-12)


def test_compile_all_two_qubit_plans(device2):
    for plan in plan_full_schedule(2):
        comp = compile_to_pulses(plan, device2)
        assert comp.accepted and comp.conversion_fidelity >= 0.99
        assert comp.sequence.total_duration <= 15e-6
        for step in comp.sequence.steps:
            if isinstance(step, Delay):
                assert step.duration == pytest.approx(1 / (2 * 2e6))


def test_compile_with_nuclear_zeeman_still_exact():
    p = DeviceParams(n=2, A_hf=1.3e6, nuclear_zeeman=4.1e5)
    for plan in plan_full_schedule(2):
        assert compile_to_pulses(plan, p).conversion_fidelity == pytest.approx(1.0, abs=1e-9)


def test_compile_errors():
    with pytest.raises(CompilationError, match="Y90"):
        compile_to_pulses(plan_conversion("EX"), DeviceParams(n=2, nuclear_rabi_freq=None))
    with pytest.raises(CompilationError, match="CZ"):
        compile_to_pulses(plan_conversion("XX"), DeviceParams(n=2, A_hf=0.0))
    with pytest.raises(CompilationError):
        compile_to_pulses(plan_conversion("XEX"), DeviceParams(n=3))


def test_finite_pulse_scoring_is_reported(device2):
    comp = compile_to_pulses(plan_conversion("XE"), DeviceParams(n=2, ideal_pulses=False))
    assert 0.9 < comp.conversion_fidelity < 1.0
