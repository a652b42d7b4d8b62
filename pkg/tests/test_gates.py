import numpy as np
import pytest

from annealgate import gates, schedules
from annealgate.evolution import evolve, overlap, populations
from annealgate.gates import (CalibrationUndefinedError, GateProgram, GateSpec,
                              ParameterOrderError, ProgramStepError,
                              calibrate_relative_phase, cnot, cnot_hamiltonians,
                              drive_frame_z_rotation, drive_populations, idle,
                              run_program, x_rotation, x_rotation_hamiltonians,
                              z_rotation, z_rotation_via_schedule)
from annealgate.operators import build_matrix
from annealgate.perturbation import xrot_populations
from annealgate.state import StateVector, basis_state, drive_state

UP, DOWN = "↑", "↓"


def test_z_rotation_examples():
    out = z_rotation(basis_state("u"), np.pi)
    assert out.amplitudes[0] == pytest.approx(np.exp(1j * np.pi))
    assert populations(out)[UP] == pytest.approx(1.0)

    out = z_rotation(drive_state("+"), np.pi / 4)
    ratio = out.amplitudes[1] / out.amplitudes[0]
    assert ratio == pytest.approx(np.exp(-1j * np.pi / 2))

    out = z_rotation(drive_state("+"), 0.0)
    assert np.array_equal(out.amplitudes, drive_state("+").amplitudes)


def test_z_rotation_on_chosen_qubit():
    out = z_rotation(basis_state("ud"), 0.3, qubit=2)
    assert out.amplitudes[1] == pytest.approx(np.exp(-1j * 0.3))


def test_z_rotation_matches_schedule_evolution():
    psi = StateVector(np.array([0.6, 0.8j]))
    t = 0.9
    exact = z_rotation(psi, t)
    integrated = z_rotation_via_schedule(psi, t, dt=0.001)
    assert np.max(np.abs(exact.amplitudes - integrated.amplitudes)) <= 1e-8


def test_junction_hamiltonians_are_diagonal():
    drive, problem, catalytic, lifted = x_rotation_hamiltonians()
    fwd = schedules.forward(drive, problem, catalytic, 1.0, 10.0)
    rev = schedules.reverse(drive, lifted, 10.0)
    for m in (fwd.sample_matrix(10.0), rev.sample_matrix(0.0)):
        off = m - np.diag(np.diag(m))
        assert np.max(np.abs(off)) < 1e-12

    drive, problem, catalytic, lifted = cnot_hamiltonians(0.3, 0.5)
    fwd = schedules.forward(drive, problem, catalytic, 2.0, 10.0)
    rev = schedules.reverse(drive, lifted, 10.0)
    for m in (fwd.sample_matrix(10.0), rev.sample_matrix(0.0)):
        off = m - np.diag(np.diag(m))
        assert np.max(np.abs(off)) < 1e-12
    # the swap changes the diagonal only through the lifted problem
    assert np.allclose(fwd.sample_matrix(10.0) - build_matrix(problem)
                       + build_matrix(lifted), rev.sample_matrix(0.0), atol=1e-12)


def test_reverse_part_maps_ground_to_ground():
    drive, _, _, lifted = x_rotation_hamiltonians()
    rev = schedules.reverse(drive, lifted, 2000.0)
    # ground of the lifted problem is |down>; drive ground is |+>
    out = evolve(rev, basis_state("d"), 0.01).final_state
    assert abs(overlap(out, drive_state("+"))) ** 2 >= 0.999
    out = evolve(rev, basis_state("u"), 0.01).final_state
    assert abs(overlap(out, drive_state("-"))) ** 2 >= 0.999


def test_x_rotation_balanced_at_zero_pulse():
    rep = x_rotation(0.0, 2000.0, 0.01, drive_state("+"))
    fwd = populations(rep.checkpoints["forward"])
    assert fwd[UP] == pytest.approx(0.5, abs=0.02)
    assert fwd[DOWN] == pytest.approx(0.5, abs=0.02)


def test_x_rotation_pole_population_at_unit_pulse():
    rep = x_rotation(1.0, 2000.0, 0.01, drive_state("+"))
    fwd = populations(rep.checkpoints["forward"])
    assert fwd[DOWN] == pytest.approx(1 / (1 + (np.sqrt(2) - 1) ** 2), abs=0.05)


def test_x_rotation_reverse_mirrors_forward_poles():
    rep = x_rotation(0.7, 2000.0, 0.01, drive_state("+"))
    fwd = populations(rep.checkpoints["forward"])
    rev = drive_populations(rep.final_state)
    assert rev["+"] == pytest.approx(fwd[DOWN], abs=0.02)
    assert rev["-"] == pytest.approx(fwd[UP], abs=0.02)


def test_x_rotation_requires_single_qubit():
    with pytest.raises(ValueError):
        x_rotation(0.0, 10.0, 0.01, drive_state("++"))


def test_cnot_parameter_order_enforced():
    with pytest.raises(ParameterOrderError):
        cnot(0.5, 0.3, 0.0, 10.0, 0.01, drive_state("++"))
    with pytest.raises(ParameterOrderError):
        GateSpec(gates.CONTROLLED_NOT, a=0.5, b=0.5)


def test_cnot_control_minus_is_inert():
    rep = cnot(0.3, 0.5, 1.0, 2000.0, 0.01, drive_state("-+"))
    assert drive_populations(rep.final_state)["-+"] >= 0.99


def test_gate_runs_are_bit_identical():
    a = x_rotation(0.9, 200.0, 0.01, drive_state("+"))
    b = x_rotation(0.9, 200.0, 0.01, drive_state("+"))
    assert np.array_equal(a.final_state.amplitudes, b.final_state.amplitudes)
    assert a.norm_drift == b.norm_drift and a.steps == b.steps


def test_idle_periodicity():
    psi = StateVector(np.array([0.8, 0.6j]))
    assert idle(psi, 0, 2.0) is psi
    for m in (1, 3):
        out = idle(psi, m, 2.0)
        fidelity = abs(np.vdot(psi.amplitudes, out.amplitudes)) ** 2
        assert fidelity >= 1 - 1e-8


def test_idle_two_qubit_register():
    psi = drive_state("+-")
    out = idle(psi, 2, 2.0)
    assert abs(np.vdot(psi.amplitudes, out.amplitudes)) ** 2 >= 1 - 1e-8


def test_idle_validation():
    psi = basis_state("u")
    with pytest.raises(ValueError):
        idle(psi, -1, 2.0)
    with pytest.raises(ValueError):
        idle(psi, 1, 0.0)


def test_drive_frame_rotation_phases():
    # |+> and |-> pick up opposite phases and keep their populations
    psi = drive_state("+")
    out = drive_frame_z_rotation(psi, 0.4)
    assert abs(overlap(out, psi)) == pytest.approx(1.0)
    mixed = StateVector((drive_state("+").amplitudes + 1j * drive_state("-").amplitudes)
                        / np.sqrt(2))
    out = drive_frame_z_rotation(mixed, 0.4)
    amps = gates.drive_amplitudes(out)
    assert np.angle(amps["-"] / amps["+"]) == pytest.approx(np.pi / 2 + 0.8)


def test_calibration_phase_extraction():
    cal = calibrate_relative_phase(GateSpec(gates.X_ROTATION, h_z=1.0, T=2000.0), dt=0.01)
    again = calibrate_relative_phase(GateSpec(gates.X_ROTATION, h_z=1.0, T=2000.0), dt=0.01)
    assert np.isfinite(cal.theta_prime)
    assert -np.pi < cal.theta_prime <= np.pi
    assert cal.theta_prime == pytest.approx(again.theta_prime, abs=1e-6)
    assert 0.0 <= cal.compensation_duration < np.pi
    assert cal.compensation_duration == pytest.approx((-cal.theta_prime / 2) % np.pi)


def test_calibration_synthetic_phases():
    # the extraction formula on hand-built states
    no_phase = StateVector((drive_state("+").amplitudes + drive_state("-").amplitudes)
                           / np.sqrt(2))
    amps = gates.drive_amplitudes(no_phase)
    assert np.angle(amps["-"]) - np.angle(amps["+"]) == pytest.approx(0.0)
    quarter = StateVector((drive_state("+").amplitudes + 1j * drive_state("-").amplitudes)
                          / np.sqrt(2))
    amps = gates.drive_amplitudes(quarter)
    assert np.angle(amps["-"]) - np.angle(amps["+"]) == pytest.approx(np.pi / 2)


def test_calibration_rejects_non_annealed_gates():
    with pytest.raises(ValueError):
        calibrate_relative_phase(GateSpec(gates.Z_ROTATION, duration=1.0))


def test_cnot_calibration_reports_per_basis_phases():
    cal = calibrate_relative_phase(
        GateSpec(gates.CONTROLLED_NOT, h_z=0.5, a=0.3, b=0.5, T=2000.0, qubits=(1, 2)),
        dt=0.01)
    assert set(cal.metadata["phases"]) >= {"++", "+-"}
    assert -np.pi < cal.theta_prime <= np.pi


def test_empty_program_is_identity():
    prog = GateProgram(1, [])
    rep = run_program(prog, drive_state("+"))
    assert np.array_equal(rep.final_state.amplitudes, drive_state("+").amplitudes)
    assert rep.steps == 0


def test_two_half_rotations_compose():
    half = GateSpec(gates.Z_ROTATION, duration=np.pi / 2)
    full = GateSpec(gates.Z_ROTATION, duration=np.pi)
    psi0 = drive_state("+")
    two = run_program(GateProgram(1, [half, half]), psi0).final_state
    one = run_program(GateProgram(1, [full]), psi0).final_state
    assert np.max(np.abs(two.amplitudes - one.amplitudes)) <= 1e-12


def test_program_x_rotation_with_calibrated_compensation():
    spec = GateSpec(gates.X_ROTATION, h_z=0.0, T=2000.0)
    cal = calibrate_relative_phase(spec, dt=0.01)
    prog = GateProgram(1, [spec, GateSpec(gates.Z_ROTATION,
                                          duration=cal.compensation_duration)])
    rep = run_program(prog, drive_state("+"), dt=0.01)
    pops = drive_populations(rep.final_state)
    assert pops["+"] == pytest.approx(0.5, abs=0.02)
    assert pops["-"] == pytest.approx(0.5, abs=0.02)
    # and the compensation actually cancels the pipeline phase
    amps = gates.drive_amplitudes(rep.final_state)
    residual = np.angle(amps["-"]) - np.angle(amps["+"])
    assert abs((residual + np.pi) % (2 * np.pi) - np.pi) <= 1e-6


def test_program_idle_steps_accept_multiples_and_durations():
    prog = GateProgram(1, [GateSpec(gates.IDLE, multiple=2)], idle_gap=2.0)
    rep = run_program(prog, drive_state("+"))
    assert abs(overlap(rep.final_state, drive_state("+"))) ** 2 >= 1 - 1e-8
    GateProgram(1, [GateSpec(gates.IDLE, duration=2 * np.pi * 3 / 2.0)], idle_gap=2.0)
    with pytest.raises(ValueError):
        GateProgram(1, [GateSpec(gates.IDLE, duration=1.0)], idle_gap=2.0)


def test_program_step_failure_carries_index():
    prog = GateProgram(2, [
        GateSpec(gates.Z_ROTATION, duration=0.1, qubits=(1,)),
        GateSpec(gates.X_ROTATION, h_z=0.0, T=10.0, qubits=(2,)),
    ])
    bad = StateVector(np.array([1.0, 0, 0, 0]))
    # sabotage: dt larger than a step's T triggers inside step 1
    with pytest.raises(ProgramStepError) as err:
        run_program(prog, bad, dt=20.0)
    assert err.value.step_index == 1


def test_program_rejects_out_of_register_targets():
    with pytest.raises(ValueError):
        GateProgram(1, [GateSpec(gates.Z_ROTATION, duration=0.1, qubits=(2,))])


def test_drive_populations_product_states():
    for label in ("++", "+-", "-+", "--"):
        pops = drive_populations(drive_state(label))
        assert pops[label] == pytest.approx(1.0)
