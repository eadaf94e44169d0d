"""Grover search with constraint-aware initial states."""
from .constraints import (CardinalityConstraint, LinearConstraint, ReducedSet, SelectedSet, Selection,
                          Strategy, optimal_queries, preprocess_cardinality, preprocess_mixed,
                          preprocess_parity, search_space_size)
from .exact_cover import (CoverInstance, brute_force, constraints_of, parse_instance, reference_instance,
                          run_experiment, weighted_reference_instance)
from .exceptions import (CagroverError, CapacityError, ContractError, DomainError, InfeasibleError,
                         InstanceFormatError, TranspileError)
from .grover import GroverRun, Mode, OraclePredicate, apply_oracle, diffusion_circuit, run, success_probability
from .noise import NoiseModel, ShotPlan, run_noisy
from .simulator import Circuit, Gate, StateVector
from .stateprep import build_initializer, dicke1_circuit, dicke11_circuit, ghz_x_circuit
from .transpile import transpile

__version__ = "0.1.0"
