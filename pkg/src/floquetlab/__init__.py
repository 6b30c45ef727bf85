"""Simulation, decoding and verification of honeycomb and ladder Floquet codes."""

from .circuit import MeasurementCircuit, calibrate, run_engine
from .decoder import DecodingGraph, Matcher, SyndromeLattice, build_decoding_graph
from .dimer import DimerConfig, build_annulus, dimer_measure, obstruction_demo, winding
from .experiments import ExperimentConfig, ResultRow, emit_curves, memory_experiment, toy_model
from .honeycomb import build_logicals, disentangle, expected_isg, run_schedule, subsystem_counts
from .ladder import LadderDecoder, ladder_circuit, ladder_noise
from .lattice import ColoringError, HoneycombTorus, LadderGraph, build_honeycomb, build_ladder
from .memory import memory_circuit, memory_noise, rounds_for
from .noise import FaultLocation, FaultSample, fault_signatures, sample
from .pauli import PauliOperator, commutes, multiply
from .stabilizer import Membership, StabilizerGroup

__version__ = "0.1.0"

__all__ = [
    "ColoringError", "DecodingGraph", "DimerConfig", "ExperimentConfig", "FaultLocation", "FaultSample",
    "HoneycombTorus", "LadderDecoder", "LadderGraph", "Matcher", "MeasurementCircuit", "Membership",
    "PauliOperator", "ResultRow", "StabilizerGroup", "SyndromeLattice", "build_annulus", "build_decoding_graph",
    "build_honeycomb", "build_ladder", "build_logicals", "calibrate", "commutes", "dimer_measure", "disentangle",
    "emit_curves", "expected_isg", "fault_signatures", "ladder_circuit", "ladder_noise", "memory_circuit",
    "memory_experiment", "memory_noise", "multiply", "obstruction_demo", "rounds_for", "run_engine", "run_schedule",
    "sample", "subsystem_counts", "toy_model", "winding",
]
