"""Grover iteration over a constraint-reduced search space.

One query is the phase oracle followed by the reflection about the
initial state ``V_F |0>``.  Three execution modes share one result shape:

* ``ideal``: matrix-free oracle and reflection on the statevector,
* ``circuit_exact``: the initializer and diffusion as gate circuits,
* ``circuit_noisy``: the transpiled circuit under Pauli-trajectory noise.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .constraints import ReducedSet, Selection, Strategy
from .exceptions import ContractError
from .noise import DESK_PLAN, NoiseModel, NoisyResult, ShotPlan, run_noisy
from .simulator import (Circuit, StateVector, apply_circuit, apply_gate, bitstring, h, mcx,
                        new_zero_state, oracle, predicate_mask, x, z)
from .stateprep import build_initializer
from .transpile import transpile


class Mode(str, enum.Enum):
    IDEAL = "ideal"
    CIRCUIT_EXACT = "circuit_exact"
    CIRCUIT_NOISY = "circuit_noisy"


@dataclass(frozen=True)
class OraclePredicate:
    """Boolean function on ``n``-bit strings (first variable leftmost)."""

    n: int
    accept: Callable[[str], bool]
    _mask: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_mask", predicate_mask(self.n, self.accept))

    @classmethod
    def from_solutions(cls, n: int, solutions: Iterable[str]) -> OraclePredicate:
        sols = frozenset(solutions)
        for s in sols:
            if len(s) != n or set(s) - {"0", "1"}:
                raise ContractError(f"{s!r} is not an {n}-bit string")
        return cls(n, sols.__contains__)

    @property
    def mask(self) -> np.ndarray:
        return self._mask

    @property
    def solutions(self) -> list[str]:
        return [bitstring(i, self.n) for i in np.flatnonzero(self._mask)]

    def __call__(self, bits: str) -> bool:
        return bool(self.accept(bits))


def apply_oracle(state: StateVector, f: OraclePredicate) -> StateVector:
    """Negate the amplitudes of accepted strings (data qubits lead, ancillas follow)."""
    if state.num_qubits < f.n:
        raise ContractError(f"oracle arity {f.n} exceeds register size {state.num_qubits}")
    amps = state.amplitudes.reshape(2 ** f.n, -1).copy()
    amps[f.mask] *= -1
    return StateVector(state.num_qubits, amps.reshape(-1))


def diffusion_circuit(init: Circuit, n: int) -> Circuit:
    """``V_F (I - 2|0><0|) V_F^dagger``, i.e. the reflection about ``V_F|0>`` up to a sign."""
    if n < 1 or n > init.num_data:
        raise ContractError(f"diffusion on {n} qubits does not match initializer with {init.num_data} data qubits")
    flips = [x(q) for q in range(n)]
    core = [z(0)] if n == 1 else [h(n - 1), mcx(range(n - 1), n - 1), h(n - 1)]
    gates = init.inverse().gates + tuple(flips + core + flips) + init.gates
    return Circuit(init.width, gates, init.ancilla_offset)


def grover_circuit(init: Circuit, f: OraclePredicate, kappa: int) -> Circuit:
    """Initializer followed by ``kappa`` queries (oracle gate, then diffusion)."""
    if kappa < 0:
        raise ContractError("kappa must be >= 0")
    diff = diffusion_circuit(init, f.n)
    query = (oracle(range(f.n), f.mask),) + diff.gates
    return Circuit(init.width, init.gates + query * kappa, init.ancilla_offset)


def success_probability(f_size: int, s_size: int, kappa: int) -> float:
    if not 1 <= s_size <= f_size:
        raise ContractError(f"need 1 <= |S| <= |F|, got |S|={s_size}, |F|={f_size}")
    theta = math.asin(math.sqrt(s_size / f_size))
    return math.sin((2 * kappa + 1) * theta) ** 2


def search_space_mask(selection: Selection, n: int) -> np.ndarray:
    """Boolean mask of the ``2**n`` strings inside the selection's search space."""
    idx = np.arange(2 ** n)
    bits = (idx[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    keep = np.ones(2 ** n, dtype=bool)
    for block in selection.blocks:
        w = bits[:, [i - 1 for i in block.members]].sum(axis=1)
        if isinstance(block, ReducedSet):
            lo, hi = block.weight_range
            keep &= (w >= lo) & (w <= hi)
        elif block.kind == "ghz":
            keep &= w % 2 == block.target
        else:
            keep &= w == block.target
    return keep


@dataclass
class GroverRun:
    """Per-query success trace (index ``k`` = after ``k`` queries) and final result.

    Exact modes record probabilities and keep the final statevector; the
    noisy mode records mean solution frequencies and keeps the per-run counts.
    """

    strategy: Strategy
    mode: Mode
    trace: np.ndarray
    final: StateVector | NoisyResult
    search_space: int
    solutions: int

    @property
    def kappa(self) -> int:
        return len(self.trace) - 1

    @property
    def success(self) -> float:
        return float(self.trace[-1])

    def expected(self) -> np.ndarray:
        """Closed-form trace for the same |F| and |S|."""
        return np.array([success_probability(self.search_space, self.solutions, k)
                         for k in range(self.kappa + 1)])


def _check_containment(f_mask: np.ndarray, f: OraclePredicate):
    outside = f.mask & ~f_mask
    if outside.any():
        first = bitstring(int(np.flatnonzero(outside)[0]), f.n)
        raise ContractError(f"solution {first} lies outside the search space "
                            f"({int(outside.sum())} solutions excluded)")


def run(strategy: Strategy, f: OraclePredicate, kappa: int, mode: Mode | str = Mode.IDEAL,
        plan: ShotPlan = DESK_PLAN, noise: NoiseModel | None = None,
        workers: int | None = None) -> GroverRun:
    """Run ``kappa`` Grover queries from the strategy's initial state."""
    mode = Mode(mode)
    if kappa < 0:
        raise ContractError("kappa must be >= 0")
    n = strategy.n
    if f.n != n:
        raise ContractError(f"oracle arity {f.n} differs from strategy width {n}")
    f_mask = search_space_mask(strategy.selection, n)
    _check_containment(f_mask, f)
    s_size = int(f.mask.sum())
    f_size = int(f_mask.sum())

    if mode is Mode.CIRCUIT_NOISY:
        init, _ = build_initializer(strategy, allow_injection=False)
        circ = transpile(grover_circuit(init, f, kappa))
        result = run_noisy(circ, plan, noise or NoiseModel(), f.mask, workers=workers)
        trace = (result.counts / plan.shots_per_run).mean(axis=0)
        return GroverRun(strategy, mode, trace, result, f_size, s_size)

    trace = np.empty(kappa + 1)
    if mode is Mode.IDEAL:
        psi0 = f_mask / math.sqrt(f_size)
        amps = psi0.astype(complex)
        for k in range(kappa + 1):
            if k:
                amps[f.mask] *= -1
                amps = 2 * np.vdot(psi0, amps) * psi0 - amps
            trace[k] = float(np.sum(np.abs(amps[f.mask]) ** 2))
        final = StateVector(n, amps)
    else:
        init, _ = build_initializer(strategy)
        diff = diffusion_circuit(init, n)
        gate = oracle(range(n), f.mask)
        state = apply_circuit(new_zero_state(init.width), init)
        for k in range(kappa + 1):
            if k:
                state = apply_circuit(apply_gate(state, gate), diff)
            trace[k] = float(state.marginal(n)[f.mask].sum())
        final = state
    return GroverRun(strategy, mode, np.clip(trace, 0.0, 1.0), final, f_size, s_size)
