"""Annealed gate operations on transverse-field Ising registers.

Simulation library for gate primitives realised purely through annealing
schedules: amplitude control through a degenerate problem Hamiltonian with
a longitudinal pulse, reverse anneals back to the drive, exact phase gates,
and analytic first-order cross-checks, plus a sweep/emulation harness.
"""

from .evolution import (EvolutionReport, NormDriftError, evolve, overlap,
                        populations, sample_measurements)
from .families import (PartitionSpec, combined_family, two_state_entangled,
                       two_state_product, verify_ground_space)
from .gates import (GateProgram, GateSpec, PhaseCalibration, calibrate_relative_phase,
                    cnot, idle, run_program, x_rotation, z_rotation)
from .operators import (PauliString, PauliSum, Spectrum, build_matrix,
                        eigen_decompose, ground_space, parse_pauli_sum)
from .perturbation import (DegeneratePair, PerturbationResult, cnot_populations,
                           first_order, generic_first_order, xrot_populations)
from .schedules import (ControlSchedule, DWaveSchedule, PiecewiseLinear,
                        conventional, dwave, forward, reverse, sample)
from .state import StateVector, basis_state, drive_state, parse_state

__version__ = "0.1.0"
