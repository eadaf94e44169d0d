"""Depolarizing noise by Monte-Carlo Pauli trajectories.

After every one-qubit basis gate a uniformly random X, Y or Z is inserted
with probability ``p1``; after every CNOT a uniformly random non-identity
two-qubit Pauli with probability ``p2``.  Oracle gates are noise-free.

The engine never simulates an error-free shot: those are sampled from a
cached ideal run.  An errored shot restarts from the last cached query
boundary before its first error.  It runs at the granularity of the
transpiler's units (Toffolis, CNOTs, source one-qubit gates), expanding a
unit to basis gates only when an error falls inside it.  Every unit equals
its expansion up to a global phase, so outcome statistics are unchanged.

The state is kept as a few branches over the data register, one per
occupied ancilla configuration.  Ancillas only ever hold classical
functions of the data plus the rare error branch, so this stays small
where a dense register would be ``2**ancillas`` times larger.
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ContractError
from .simulator import Circuit, Gate, GateKind, apply_gate_tensor, predicate_mask, sample_indices, x, z
from .transpile import is_transpiled

WORKERS_ENV = "CAGROVER_WORKERS"
_DROP = 1e-26


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if not 0.0 <= p <= 1.0:
                raise ContractError(f"error rate {p} outside [0, 1]")


REFERENCE_NOISE = NoiseModel(1e-5, 1e-4)


@dataclass(frozen=True)
class ShotPlan:
    runs: int = 20
    shots_per_run: int = 250
    seed: int = 0

    def __post_init__(self):
        if self.runs < 1 or self.shots_per_run < 1:
            raise ContractError("runs and shots_per_run must be >= 1")


DESK_PLAN = ShotPlan(20, 250)
FULL_PLAN = ShotPlan(20, 1000)


def run_seed(seed: int, run: int) -> int:
    """Seed whose ``default_rng(...).random(shots)`` drives the final measurement of ``run``."""
    return int(np.random.SeedSequence([seed, run]).generate_state(1, dtype=np.uint64)[0])


@dataclass
class NoisyResult:
    """Solution counts per run (rows) and per measurement point (columns).

    Measurement points are the query boundaries (before each oracle) plus
    the end of the circuit, so column ``k`` is the count after ``k``
    queries of a Grover circuit.
    """

    counts: np.ndarray
    shots_per_run: int
    errored: np.ndarray

    @property
    def final(self) -> np.ndarray:
        return self.counts[:, -1]

    def mean(self, point: int = -1) -> float:
        return float(self.counts[:, point].mean())

    def std(self, point: int = -1) -> float:
        return float(self.counts[:, point].std(ddof=1)) if len(self.counts) > 1 else 0.0

    def fraction(self, point: int = -1) -> np.ndarray:
        return self.counts[:, point] / self.shots_per_run


class BranchState:
    """State of data + ancilla qubits, stored per occupied ancilla configuration.

    ``configs[a]`` is an ancilla bit pattern (first ancilla most significant)
    and ``rows[a]`` the data-register amplitudes paired with it.
    """

    def __init__(self, num_data: int, num_ancillas: int, configs: np.ndarray, rows: np.ndarray):
        self.nd, self.na = num_data, num_ancillas
        self.configs, self.rows = configs, rows

    @classmethod
    def zero(cls, num_data: int, num_ancillas: int) -> BranchState:
        rows = np.zeros((1, 2 ** num_data), dtype=complex)
        rows[0, 0] = 1.0
        return cls(num_data, num_ancillas, np.zeros(1, dtype=np.int64), rows)

    def copy(self) -> BranchState:
        return BranchState(self.nd, self.na, self.configs.copy(), self.rows.copy())

    def data_probabilities(self) -> np.ndarray:
        return (np.abs(self.rows) ** 2).sum(axis=0)

    def dense(self) -> np.ndarray:
        out = np.zeros((2 ** self.nd, 2 ** self.na), dtype=complex)
        out[:, self.configs] = self.rows.T
        return out.reshape(-1)

    def apply(self, gate: Gate) -> None:
        nd = self.nd
        anc = [q for q in gate.qubits if q >= nd]
        if not anc:
            apply_gate_tensor(self.rows.reshape((len(self.rows),) + (2,) * nd), gate)
            return
        k = len(anc)
        bits = [self.na - 1 - (q - nd) for q in anc]
        cleared = self.configs & ~np.int64(sum(1 << b for b in bits))
        local = np.zeros_like(self.configs)
        for i, b in enumerate(bits):
            local |= ((self.configs >> b) & 1) << (k - 1 - i)
        keys, group = np.unique(cleared, return_inverse=True)
        block = np.zeros((len(keys), 2 ** k, 2 ** nd), dtype=complex)
        block[group, local] = self.rows
        mapping = {q: (anc.index(q) if q >= nd else k + q) for q in gate.qubits}
        apply_gate_tensor(block.reshape((len(keys),) + (2,) * (k + nd)), gate.remap(mapping))
        weight = (block.real ** 2 + block.imag ** 2).sum(axis=2)
        gi, li = np.nonzero(weight > _DROP)
        configs = keys[gi].copy()
        for i, b in enumerate(bits):
            configs |= ((li >> (k - 1 - i)) & 1) << b
        self.configs, self.rows = configs, block[gi, li]


_PAULI_GATES = {1: (x,), 2: (z, x), 3: (z,)}  # Y = i X Z; the phase is global


def _apply_pauli(state: BranchState, qubit: int, code: int) -> None:
    for make in _PAULI_GATES.get(code, ()):
        state.apply(make(qubit))


def _apply_error(state: BranchState, qubits: tuple[int, ...], code: int) -> None:
    if len(qubits) == 1:
        _apply_pauli(state, qubits[0], code)
    else:
        _apply_pauli(state, qubits[0], code // 4)
        _apply_pauli(state, qubits[1], code % 4)


@dataclass
class _Program:
    basis: tuple[Gate, ...]
    units: tuple[tuple[Gate, int, int], ...]
    arity: np.ndarray
    unit_starts: np.ndarray
    boundaries: list[int]
    num_data: int
    num_ancillas: int
    checkpoints: list[BranchState] = field(default_factory=list)
    ideal_cdfs: list[np.ndarray] = field(default_factory=list)
    solution_mask: np.ndarray | None = None

    @classmethod
    def build(cls, circuit: Circuit, mask: np.ndarray, strict: bool) -> _Program:
        if strict and not is_transpiled(circuit):
            raise ContractError("run_noisy expects a transpiled circuit (strict mode)")
        units = circuit.units
        if units is None:
            units = tuple((g, i, i + 1) for i, g in enumerate(circuit.gates))
        arity = np.array([0 if g.kind is GateKind.ORACLE or len(g.qubits) > 2 else len(g.qubits)
                          for g in circuit.gates], dtype=np.int8)
        boundaries = [i for i, (g, _, _) in enumerate(units) if g.kind is GateKind.ORACLE]
        boundaries.append(len(units))
        prog = cls(circuit.gates, units, arity, np.array([s for _, s, _ in units]), boundaries,
                   circuit.num_data, circuit.width - circuit.num_data, solution_mask=mask)
        prog._ideal_pass()
        return prog

    def _ideal_pass(self):
        state = BranchState.zero(self.num_data, self.num_ancillas)
        u = 0
        for b in self.boundaries:
            for gate, _, _ in self.units[u:b]:
                state.apply(gate)
            u = b
            self.checkpoints.append(state.copy())
            self.ideal_cdfs.append(np.cumsum(state.data_probabilities()))

    def trajectory(self, errors: list[tuple[int, int]]) -> tuple[int, list[np.ndarray]]:
        """Simulate one errored shot.

        ``errors`` lists (basis position, Pauli code) sorted by position.
        Returns the index of the first measurement point affected and the
        data-register distributions from that point on.
        """
        by_unit: dict[int, list[tuple[int, int]]] = {}
        for pos, code in errors:
            u = int(np.searchsorted(self.unit_starts, pos, side="right") - 1)
            by_unit.setdefault(u, []).append((pos, code))
        first = min(by_unit)
        b0 = int(np.searchsorted(self.boundaries, first, side="right") - 1)
        start = self.boundaries[b0] if b0 >= 0 else 0
        state = self.checkpoints[b0].copy() if b0 >= 0 else BranchState.zero(self.num_data, self.num_ancillas)
        out = []
        u = start
        for b in self.boundaries[b0 + 1:]:
            for idx in range(u, b):
                gate, lo, hi = self.units[idx]
                hits = by_unit.get(idx)
                if hits is None:
                    state.apply(gate)
                    continue
                pending = dict(hits)
                for pos in range(lo, hi):
                    basis_gate = self.basis[pos]
                    state.apply(basis_gate)
                    if pos in pending:
                        _apply_error(state, basis_gate.qubits, pending[pos])
            u = b
            out.append(state.data_probabilities())
        return b0 + 1, out


def _sample_errors(prog: _Program, noise: NoiseModel, shots: int, rng: np.random.Generator):
    pos1 = np.flatnonzero(prog.arity == 1)
    pos2 = np.flatnonzero(prog.arity == 2)
    k1 = rng.binomial(len(pos1), noise.p1, size=shots) if len(pos1) and noise.p1 else np.zeros(shots, int)
    k2 = rng.binomial(len(pos2), noise.p2, size=shots) if len(pos2) and noise.p2 else np.zeros(shots, int)
    per_shot: dict[int, list[tuple[int, int]]] = {}
    for s in np.flatnonzero(k1 + k2):
        errs = [(int(p), int(c)) for p, c in zip(rng.choice(pos1, k1[s], replace=False),
                                                 rng.integers(1, 4, size=k1[s]))]
        errs += [(int(p), int(c)) for p, c in zip(rng.choice(pos2, k2[s], replace=False),
                                                  rng.integers(1, 16, size=k2[s]))]
        per_shot[int(s)] = sorted(errs)
    return per_shot


def _simulate_run(prog: _Program, noise: NoiseModel, plan: ShotPlan, run: int) -> tuple[np.ndarray, int]:
    shots = plan.shots_per_run
    points = len(prog.boundaries)
    errors = _sample_errors(prog, noise, shots, np.random.default_rng([plan.seed, run, 2]))
    uniforms = np.empty((points, shots))
    uniforms[-1] = np.random.default_rng(run_seed(plan.seed, run)).random(shots)
    if points > 1:
        uniforms[:-1] = np.random.default_rng([plan.seed, run, 1]).random((points - 1, shots))
    outcomes = np.empty((points, shots), dtype=np.int64)
    for b, cdf in enumerate(prog.ideal_cdfs):
        outcomes[b] = np.minimum(np.searchsorted(cdf, uniforms[b] * cdf[-1], side="right"), len(cdf) - 1)
    for s, errs in errors.items():
        first, dists = prog.trajectory(errs)
        for b, probs in zip(range(first, points), dists):
            outcomes[b, s] = sample_indices(probs, uniforms[b, s:s + 1])[0]
    counts = prog.solution_mask[outcomes].sum(axis=1)
    return counts, len(errors)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_noisy(circuit: Circuit, plan: ShotPlan, noise: NoiseModel, predicate,
              strict: bool = True, workers: int | None = None) -> NoisyResult:
    """Sample the circuit under depolarizing noise and count solution outcomes.

    ``predicate`` is a callable on data-register bitstrings or a boolean
    mask over them.  Results depend only on ``plan.seed`` (runs use
    independent derived streams), not on ``workers``.  With
    ``strict=False`` an untranspiled circuit is accepted; gates on three
    or more qubits are then treated as noise-free.
    """
    mask = predicate_mask(circuit.num_data, predicate)
    prog = _Program.build(circuit, mask, strict)
    workers = default_workers() if workers is None else workers
    runs = range(plan.runs)
    if workers > 1 and plan.runs > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_simulate_run, [prog] * plan.runs, [noise] * plan.runs,
                                    [plan] * plan.runs, runs))
    else:
        results = [_simulate_run(prog, noise, plan, r) for r in runs]
    counts = np.array([c for c, _ in results], dtype=np.int64)
    errored = np.array([e for _, e in results], dtype=np.int64)
    return NoisyResult(counts, plan.shots_per_run, errored)


COUNT_HEADER = ("strategy", "kappa", "run", "count", "mode")


def count_rows(strategy: str, result: NoisyResult, kappas=None, mode: str = "noisy") -> list[tuple]:
    """One row per (query count, run); ``kappas`` defaults to every measurement point."""
    points = range(result.counts.shape[1]) if kappas is None else kappas
    return [(strategy, k, r, int(result.counts[r, k]), mode) for k in points for r in range(len(result.counts))]


def write_counts_csv(rows, stream=None) -> str:
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COUNT_HEADER)
    writer.writerows(rows)
    return buf.getvalue() if stream is None else ""
