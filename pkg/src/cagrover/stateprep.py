"""Initial-state circuits: Dicke, relaxed Dicke, X-basis GHZ and Hadamard padding.

Block builders return circuits on qubits ``0..mu-1``; ``build_initializer``
places them on the qubits of each selected variable set.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .constraints import ReducedSet, SelectedSet, Selection, Strategy
from .exceptions import ContractError
from .simulator import Circuit, Gate, cry, cx, h, prepare, ry, x, z


def _check_size(mu: int):
    if mu < 1:
        raise ContractError(f"block size must be >= 1, got {mu}")


def _cascade(mu: int) -> list[Gate]:
    # Moves the excitation from qubit i onward so each position keeps 1/sqrt(mu) of it.
    gates = []
    for i in range(mu - 1):
        theta = 2 * math.acos(1 / math.sqrt(mu - i))
        gates += [cry(i, i + 1, theta), cx(i + 1, i)]
    return gates


def dicke1_circuit(mu: int) -> Circuit:
    """Uniform superposition of the ``mu`` weight-one strings."""
    _check_size(mu)
    return Circuit(mu, [x(0)] + _cascade(mu))


def dicke11_circuit(mu: int) -> Circuit:
    """All-zero string plus the ``mu`` weight-one strings, equal amplitudes."""
    _check_size(mu)
    theta = 2 * math.acos(1 / math.sqrt(mu + 1))
    return Circuit(mu, [ry(0, theta)] + _cascade(mu))


def ghz_x_circuit(mu: int, parity: int) -> Circuit:
    """Uniform superposition of the ``mu``-bit strings with weight parity ``parity``.

    Built as a computational-basis GHZ state followed by Hadamards.  Odd
    parity needs a relative minus sign, added by a Z on the first qubit
    after its CNOT.  At ``mu == 2`` that Z and the closing Hadamard are
    fused into ``RY(pi/2)`` (equal as matrices) to keep the depth at three.
    """
    _check_size(mu)
    if parity not in (0, 1):
        raise ContractError("parity must be 0 or 1")
    if mu == 1:
        return Circuit(1, [x(0)] if parity else [])
    gates = [h(0)]
    for i in range(mu - 1):
        gates.append(cx(i, i + 1))
        if i == 0 and parity and mu > 2:
            gates.append(z(0))
    if parity and mu == 2:
        gates += [ry(0, math.pi / 2), h(1)]
    else:
        gates += [h(i) for i in range(mu)]
    return Circuit(mu, gates)


def weight_window_amplitudes(mu: int, lo: int, hi: int) -> np.ndarray:
    """Uniform amplitudes over the ``mu``-bit strings with weight in ``[lo, hi]``."""
    lo, hi = max(lo, 0), min(hi, mu)
    if lo > hi:
        raise ContractError(f"empty weight window [{lo}, {hi}] for {mu} bits")
    amps = np.zeros(2 ** mu)
    for w in range(lo, hi + 1):
        for ones in combinations(range(mu), w):
            amps[sum(1 << (mu - 1 - q) for q in ones)] = 1.0
    return amps / math.sqrt(amps.sum())


def dicke_amplitudes(mu: int, weight: int) -> np.ndarray:
    if not 0 <= weight <= mu:
        raise ContractError(f"weight {weight} outside [0, {mu}]")
    return weight_window_amplitudes(mu, weight, weight)


def relaxed_dicke_amplitudes(mu: int, target: int, overlap: int) -> np.ndarray:
    _check_size(mu)
    if target < 0 or overlap < 0:
        raise ContractError("target and overlap must be non-negative")
    return weight_window_amplitudes(mu, target - overlap, target)


# Block kinds ----------------------------------------------------------------

@dataclass(frozen=True)
class PreparedStateKind:
    """How one block is realized.

    ``variant`` is one of ``dicke1``, ``dicke11``, ``ghz_x``, ``basis``
    (weight 0 or all ones), ``dicke_general``, ``relaxed_dicke`` or
    ``hadamard``.  The last two injected variants have no circuit here and
    are realized as a single ``prepare`` gate.
    """

    variant: str
    size: int
    weight: int = 0
    low: int = 0
    high: int = 0

    @property
    def has_circuit(self) -> bool:
        return self.variant not in ("dicke_general", "relaxed_dicke")

    def circuit(self) -> Circuit:
        mu = self.size
        if self.variant == "dicke1":
            return dicke1_circuit(mu)
        if self.variant == "dicke11":
            return dicke11_circuit(mu)
        if self.variant == "ghz_x":
            return ghz_x_circuit(mu, self.weight)
        if self.variant == "basis":
            return Circuit(mu, [x(q) for q in range(mu)] if self.weight else [])
        if self.variant == "hadamard":
            return Circuit(mu, [h(q) for q in range(mu)])
        return Circuit(mu, [prepare(range(mu), self.amplitudes())])

    def amplitudes(self) -> np.ndarray:
        if self.variant == "ghz_x":
            amps = np.array([bin(i).count("1") % 2 == self.weight for i in range(2 ** self.size)], float)
            return amps / math.sqrt(amps.sum())
        if self.variant == "hadamard":
            return np.full(2 ** self.size, 2 ** (-self.size / 2))
        return weight_window_amplitudes(self.size, self.low, self.high)


def _window_kind(mu: int, lo: int, hi: int) -> PreparedStateKind:
    if lo == hi:
        if lo == 1:
            return PreparedStateKind("dicke1", mu, 1, 1, 1)
        if lo in (0, mu):
            return PreparedStateKind("basis", mu, int(lo == mu), lo, hi)
        return PreparedStateKind("dicke_general", mu, lo, lo, hi)
    if (lo, hi) == (0, 1):
        return PreparedStateKind("dicke11", mu, 1, 0, 1)
    return PreparedStateKind("relaxed_dicke", mu, hi, lo, hi)


def block_kind(block: SelectedSet | ReducedSet) -> PreparedStateKind:
    mu = block.size
    if isinstance(block, ReducedSet):
        return _window_kind(mu, *block.weight_range)
    if block.kind == "ghz":
        return PreparedStateKind("ghz_x", mu, block.target)
    return _window_kind(mu, block.target, block.target)


def _place(circuit: Circuit, qubits: Sequence[int]) -> list[Gate]:
    return [g.remap(qubits) for g in circuit.gates]


def build_initializer(strategy: Strategy | Selection, n: int | None = None,
                      allow_injection: bool = True) -> tuple[Circuit, dict[int, int]]:
    """Product-form initializer for a selection on ``n`` qubits.

    Each block is prepared on the qubits of its variables (variable ``i`` on
    qubit ``i - 1``) and every unconstrained qubit gets a Hadamard.  Returns
    the circuit and the variable -> position map of the block-first
    ordering.  ``allow_injection=False`` rejects blocks that have no
    circuit construction.
    """
    if isinstance(strategy, Strategy):
        selection, n = strategy.selection, strategy.n
    else:
        selection = strategy
        if n is None:
            raise ContractError("n is required when passing a bare Selection")
    used: set[int] = set()
    gates: list[Gate] = []
    for block in selection.blocks:
        members = block.members
        if used.intersection(members):
            raise ContractError("initializer blocks overlap")
        if max(members) > n:
            raise ContractError(f"variable {max(members)} beyond n={n}")
        used.update(members)
        kind = block_kind(block)
        if not kind.has_circuit and not allow_injection:
            raise ContractError(f"{kind.variant} blocks have no circuit construction; "
                                "only ideal simulation supports them")
        gates += _place(kind.circuit(), [i - 1 for i in members])
    gates += [h(i - 1) for i in range(1, n + 1) if i not in used]
    return Circuit(n, gates), selection.permutation(n)
