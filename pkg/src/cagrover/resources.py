"""Gate-count / two-qubit-count / depth accounting and the cost model for
comparing initialization strategies.

A strategy's total cost is ``S + (O + D + 2 S) * kappa``: one preparation,
then per query the oracle, the reflection core and the preparation plus
its inverse.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .exceptions import DomainError
from .simulator import Circuit, GateKind, h, mcx, x, z
from .transpile import expand_mcx, lower, vchain_ancillas

Metric = Literal["total_gates", "two_qubit_gates", "depth"]
METRICS: tuple[Metric, ...] = ("total_gates", "two_qubit_gates", "depth")


@dataclass(frozen=True)
class ResourceTally:
    total_gates: int = 0
    two_qubit_gates: int = 0
    depth: int = 0

    def __getitem__(self, metric: Metric) -> int:
        return getattr(self, metric)

    def as_tuple(self) -> tuple[int, int, int]:
        return self.total_gates, self.two_qubit_gates, self.depth


def tally(circuit: Circuit, decompose: bool = False) -> ResourceTally:
    """Count gates, multi-qubit gates and greedy-layer depth.

    Oracle gates are not counted (their cost is supplied separately).  With
    ``decompose`` every multi-controlled X is replaced by its V-chain in the
    {RZ, H, CNOT} basis first; otherwise it counts as a single gate.
    """
    gates = []
    for g in circuit.gates:
        if g.kind is GateKind.ORACLE:
            continue
        if decompose and g.kind is GateKind.MCX:
            k = g.num_controls
            anc = range(circuit.width, circuit.width + vchain_ancillas(k))
            gates += [b for rung in expand_mcx(g, anc) for b in lower(rung)]
        else:
            gates.append(g)
    layer: dict[int, int] = {}
    depth = 0
    for g in gates:
        level = 1 + max((layer.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            layer[q] = level
        depth = max(depth, level)
    return ResourceTally(len(gates), sum(1 for g in gates if len(g.qubits) >= 2), depth)


def mcx_cost(controls: int) -> ResourceTally:
    """Basis-level cost of an X with ``controls`` controls via the V-chain."""
    if controls < 1:
        raise DomainError("need at least one control")
    return tally(Circuit(controls + 1, [mcx(range(controls), controls)]), decompose=True)


def diffusion_core_circuit(n: int) -> Circuit:
    """``X^n . (H . MCX . H on the last qubit) . X^n``: the reflection
    ``I - 2|0><0|`` (a global sign away from ``2|0><0| - I``)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    flips = [x(q) for q in range(n)]
    if n == 1:
        return Circuit(1, flips + [z(0)] + flips)
    core = [h(n - 1), mcx(range(n - 1), n - 1), h(n - 1)]
    return Circuit(n, flips + core + flips)


@dataclass(frozen=True)
class StrategyCost:
    """Inputs to the cost model; ``oracle`` is a scalar in the chosen metric."""

    prep: ResourceTally
    oracle: float
    diffusion_core: ResourceTally
    kappa: int

    def __post_init__(self):
        if self.oracle < 0 or self.kappa < 0:
            raise DomainError("costs and query counts must be non-negative")


def total_cost(s: float, o: float, d: float, kappa: float) -> float:
    return s + (o + d + 2 * s) * kappa


def total_resource(cost: StrategyCost, metric: Metric = "total_gates") -> float:
    return total_cost(cost.prep[metric], cost.oracle, cost.diffusion_core[metric], cost.kappa)


def efficiency_bound(s_tau: float, s_sigma: float, kappa_tau: int, kappa_sigma: int) -> float:
    """Smallest ``O_sigma + D`` for which strategy tau beats sigma.

    Valid only when tau needs fewer queries than sigma.
    """
    if kappa_sigma <= kappa_tau:
        raise DomainError(f"no query improvement: kappa_sigma={kappa_sigma} <= kappa_tau={kappa_tau}")
    return (2 * kappa_tau + 1) / (kappa_sigma - kappa_tau) * (s_tau - s_sigma) - 2 * s_sigma


# Sufficient conditions ------------------------------------------------------

_DEN3 = 21 * math.sqrt(2) - 8 * math.pi

P1_THRESHOLD = 67
P2_THRESHOLD = 97


def prop1_factor(mu: int) -> float:
    """Coefficient of the preparation overhead when adding a weight-one Dicke block."""
    if mu < 2:
        raise DomainError("requires block size >= 2")
    return 24 * math.pi / (21 * math.sqrt(2 ** mu / mu) - 8 * math.pi)


def prop2_factor(mu: int) -> float:
    """Coefficient when growing a weight-one Dicke block from ``mu`` to ``mu + 1``."""
    if mu < 2:
        raise DomainError("requires block size >= 2")
    return 120 * math.pi / (109 * math.sqrt(2 * mu / (mu + 1)) - 40 * math.pi)


def prop3_factor() -> float:
    """Coefficient when adding an X-basis GHZ block (halves the space for any size)."""
    return 24 * math.pi / _DEN3


def prop1_simplified(mu: int) -> float:
    """Bound with a preparation overhead of at most ``2 mu`` and ``S_prev`` dropped."""
    return prop1_factor(mu) * 2 * mu


def prop2_simplified(mu: int) -> float:
    return prop2_factor(mu) * 2


def prop3_simplified(mu: int) -> float:
    if mu < 1:
        raise DomainError("requires block size >= 1")
    return prop3_factor() * (2 * mu + 1)


@dataclass(frozen=True)
class PropositionResult:
    kind: str
    rhs: float
    sufficient: bool


_RATIO_FLOOR = {"P1": 64, "P2": 100, "P3": 64}


def proposition_check(kind: str, mu: int, s_next: float, s_prev: float, o_plus_d: float,
                      f_prev: int | None = None, s_size: int | None = None) -> PropositionResult:
    """Evaluate one sufficient condition: ``sufficient`` iff ``o_plus_d > rhs``.

    ``f_prev`` and ``s_size`` are optional; when given, the search-space
    precondition of the condition is enforced.
    """
    kind = kind.upper()
    if kind not in _RATIO_FLOOR:
        raise DomainError(f"unknown proposition {kind!r}")
    if f_prev is not None and s_size is not None and f_prev < _RATIO_FLOOR[kind] * s_size:
        raise DomainError(f"{kind} requires |F| >= {_RATIO_FLOOR[kind]}|S|")
    factor = {"P1": prop1_factor, "P2": prop2_factor}.get(kind)
    coeff = factor(mu) if factor else prop3_factor()
    rhs = coeff * (s_next - s_prev) - 2 * s_prev
    return PropositionResult(kind, rhs, o_plus_d > rhs)


# CSV ------------------------------------------------------------------------

RESOURCE_HEADER = ("strategy", "metric", "S", "O", "D", "kappa", "R")


def resource_rows(name: str, prep: ResourceTally, oracle: float, core: ResourceTally,
                  kappa: int, metrics: Sequence[Metric] = METRICS) -> list[tuple]:
    cost = StrategyCost(prep, oracle, core, kappa)
    return [(name, m, prep[m], oracle, core[m], kappa, total_resource(cost, m)) for m in metrics]


def write_resource_csv(rows: Iterable[Sequence], stream=None) -> str:
    """Write rows under :data:`RESOURCE_HEADER`; returns the text when no stream is given."""
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESOURCE_HEADER)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue() if stream is None else ""
