"""Simulation and pulse optimisation of a conditional-driving R_zz gate between
two flux-pumped Kerr parametric oscillators."""

__version__ = "0.1.0"

from .basis import ComputationalBasis, computational_basis, computational_basis_for, normal_modes
from .circuit import CircuitModel, CircuitParams, derive_circuit_params, eigenfrequencies, reference_params
from .experiment import GateSetup, Flags
from .fidelity import IdealGate, average_gate_fidelity
from .propagate import GateMatrix, PropagationError, TwoModeState, evolve, run_gate
from .pulses import PulseProgram
from .rwa import RwaModel, RwaParams, rwa_params
from .static import StaticModel
