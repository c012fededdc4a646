"""Travelling-salesman search by quantum phase estimation on a dense statevector simulator."""
from .encoding import (
    DiagonalUnitary,
    Eigenstate,
    Gate,
    GateSequence,
    Tour,
    TourPhaseOperator,
    build_phase_operator,
    controlled_power,
    decompose_diagonal,
    eigenstate_to_tour,
    tour_to_eigenstate,
)
from .instance import PhaseMap, TspInstance, apply_penalty, normalize, example_instance, validate
from .minsearch import CostDatabase, SearchResult, classical_argmin, durr_hoyer_minimum, grover_search_below
from .oracle import brute_force_solve, build_tour_table, enumerate_tours, tour_cost
from .qpe import QpeConfig, QpeOutcome, decode_outcome, phase_qubits, run_all_routes, run_qpe
from .simulator import OutcomeDistribution, StateVector, apply_diagonal_fast, inverse_qft, measure

__version__ = "0.1.0"
