"""Exact-cover and weighted-coverage instances: text format, constraint
derivation, brute-force solving and end-to-end Grover experiments.

Instance text format (UTF-8, ``#`` starts a comment)::

    universe: 1 2 3 4 5 6 7
    subset 1: 1 5
    subset 3: 1 2 5 weight 2
    target: 2
"""
from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .constraints import (CardinalityConstraint, Constraint, LinearConstraint, ReducedSet, SelectedSet,
                          Selection, Strategy, normalize_linear, parity_set, preprocess_cardinality,
                          preprocess_mixed, preprocess_parity)
from .exceptions import CapacityError, ContractError, InfeasibleError, InstanceFormatError
from .grover import Mode, OraclePredicate, run, search_space_mask
from .noise import DESK_PLAN, NoiseModel, ShotPlan
from .simulator import bitstring

MAX_BRUTE_FORCE = 24


@dataclass(frozen=True)
class CoverInstance:
    """Select subsets so every element's weighted coverage equals ``target``."""

    universe: tuple[str, ...]
    subsets: tuple[frozenset[str], ...]
    weights: tuple[int, ...] | None = None
    target: int = 1

    def __post_init__(self):
        object.__setattr__(self, "universe", tuple(str(u) for u in self.universe))
        object.__setattr__(self, "subsets", tuple(frozenset(str(e) for e in s) for s in self.subsets))
        n = len(self.subsets)
        weights = tuple(int(a) for a in self.weights) if self.weights is not None else (1,) * n
        object.__setattr__(self, "weights", weights)
        if len(set(self.universe)) != len(self.universe):
            raise ContractError("universe elements must be distinct")
        if n == 0:
            raise ContractError("instance has no subsets")
        if len(weights) != n:
            raise ContractError("one weight per subset required")
        if any(a < 1 for a in weights):
            raise ContractError("weights must be positive integers")
        if self.target < 1:
            raise ContractError("coverage target must be a positive integer")
        known = set(self.universe)
        for i, s in enumerate(self.subsets, 1):
            if not s:
                raise ContractError(f"subset {i} is empty")
            if s - known:
                raise ContractError(f"subset {i} uses elements outside the universe: {sorted(s - known)}")

    @property
    def n(self) -> int:
        return len(self.subsets)

    def cover_sets(self) -> list[tuple[int, ...]]:
        """For each element, the (1-based) subsets containing it."""
        return [tuple(i for i, s in enumerate(self.subsets, 1) if u in s) for u in self.universe]

    def coverage(self, bits: Sequence[int]) -> list[int]:
        return [sum(self.weights[i - 1] * bits[i - 1] for i in c) for c in self.cover_sets()]

    def is_solution(self, bits: Sequence[int]) -> bool:
        return all(c == self.target for c in self.coverage(bits))


_UNIVERSE = re.compile(r"^universe\s*:(.*)$", re.I)
_SUBSET = re.compile(r"^subset\s+(\d+)\s*:(.*)$", re.I)
_TARGET = re.compile(r"^target\s*:\s*(\S+)\s*$", re.I)


def parse_instance(text: str) -> CoverInstance:
    universe: list[str] | None = None
    subsets: dict[int, tuple[list[str], int]] = {}
    target = 1
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        last = lineno
        if m := _UNIVERSE.match(line):
            if universe is not None:
                raise InstanceFormatError("universe given twice", lineno)
            universe = m.group(1).split()
            if not universe:
                raise InstanceFormatError("empty universe", lineno)
        elif m := _SUBSET.match(line):
            idx, body = int(m.group(1)), m.group(2).split()
            weight = 1
            if "weight" in body:
                k = body.index("weight")
                if k != len(body) - 2:
                    raise InstanceFormatError("expected 'weight <int>' at the end of the line", lineno)
                try:
                    weight = int(body[-1])
                except ValueError:
                    raise InstanceFormatError(f"bad weight {body[-1]!r}", lineno) from None
                if weight < 1:
                    raise InstanceFormatError("weights must be positive", lineno)
                body = body[:k]
            if idx in subsets:
                raise InstanceFormatError(f"subset {idx} given twice", lineno)
            if not body:
                raise InstanceFormatError(f"subset {idx} is empty", lineno)
            if universe is not None and set(body) - set(universe):
                raise InstanceFormatError(f"unknown elements {sorted(set(body) - set(universe))}", lineno)
            subsets[idx] = (body, weight)
        elif m := _TARGET.match(line):
            try:
                target = int(m.group(1))
            except ValueError:
                raise InstanceFormatError(f"bad target {m.group(1)!r}", lineno) from None
            if target < 1:
                raise InstanceFormatError("target must be positive", lineno)
        else:
            raise InstanceFormatError(f"unrecognized line {line!r}", lineno)
    if universe is None:
        raise InstanceFormatError("missing 'universe:' line", last or 1)
    if not subsets:
        raise InstanceFormatError("no subsets given", last or 1)
    if sorted(subsets) != list(range(1, len(subsets) + 1)):
        raise InstanceFormatError(f"subsets must be numbered 1..{len(subsets)}", last)
    ordered = [subsets[i] for i in range(1, len(subsets) + 1)]
    return CoverInstance(universe, [s for s, _ in ordered], [w for _, w in ordered], target)


def format_instance(inst: CoverInstance) -> str:
    lines = ["universe: " + " ".join(inst.universe)]
    for i, (s, w) in enumerate(zip(inst.subsets, inst.weights), 1):
        members = [u for u in inst.universe if u in s]
        lines.append(f"subset {i}: " + " ".join(members) + (f" weight {w}" if w != 1 else ""))
    if inst.target != 1:
        lines.append(f"target: {inst.target}")
    return "\n".join(lines) + "\n"


def load_instance(path) -> CoverInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def constraints_of(inst: CoverInstance) -> list[Constraint]:
    """One equality constraint per element over the subsets that contain it."""
    out: list[Constraint] = []
    for u, members in zip(inst.universe, inst.cover_sets()):
        if not members:
            raise InfeasibleError(f"element {u} is covered by no subset")
        if all(inst.weights[i - 1] == 1 for i in members):
            out.append(CardinalityConstraint(members, inst.target))
        else:
            out.append(LinearConstraint({i: inst.weights[i - 1] for i in members}, inst.target))
    return out


@dataclass(frozen=True)
class SolutionSet:
    n: int
    bitstrings: frozenset[str]

    def __len__(self):
        return len(self.bitstrings)

    def __contains__(self, bits: str) -> bool:
        return bits in self.bitstrings

    def selected(self) -> list[tuple[int, ...]]:
        """Subset indices chosen by each solution."""
        return [tuple(i + 1 for i, b in enumerate(s) if b == "1") for s in sorted(self.bitstrings)]

    def predicate(self) -> OraclePredicate:
        return OraclePredicate.from_solutions(self.n, self.bitstrings)


def solution_mask(inst: CoverInstance) -> np.ndarray:
    """Boolean mask over all ``2**n`` assignments that solve the instance."""
    n = inst.n
    if n > MAX_BRUTE_FORCE:
        raise CapacityError(f"brute force limited to {MAX_BRUTE_FORCE} subsets, got {n}")
    idx = np.arange(2 ** n, dtype=np.int64)
    weighted = np.zeros(2 ** n, dtype=np.int64)
    ok = np.ones(2 ** n, dtype=bool)
    for members in inst.cover_sets():
        weighted[:] = 0
        for i in members:
            weighted += inst.weights[i - 1] * ((idx >> (n - i)) & 1)
        ok &= weighted == inst.target
    return ok


def brute_force(inst: CoverInstance) -> SolutionSet:
    """All assignments meeting every coverage requirement, found by enumeration."""
    found = [bitstring(int(i), inst.n) for i in np.flatnonzero(solution_mask(inst))]
    for s in found:
        if not inst.is_solution([int(b) for b in s]):
            raise AssertionError(f"enumeration accepted a non-solution {s}")
    return SolutionSet(inst.n, frozenset(found))


# Strategies -----------------------------------------------------------------

def _cardinality_only(constraints: Sequence[Constraint]) -> list[int]:
    return [j for j, c in enumerate(constraints) if isinstance(c, CardinalityConstraint)]


def _explicit_selection(constraints: Sequence[Constraint], items: Sequence[str]) -> Selection:
    """Blocks listed by 1-based constraint index.

    ``j`` is a Hamming-weight block for a cardinality constraint and a
    parity block otherwise, ``gj`` forces a parity block and ``rj`` keeps
    the part of cardinality constraint ``j`` not claimed by earlier items.
    """
    sel = Selection()
    for item in items:
        m = re.fullmatch(r"([rg]?)(\d+)", item.strip().lower())
        if not m:
            raise ContractError(f"bad set reference {item!r}")
        tag, j = m.group(1), int(m.group(2))
        if not 1 <= j <= len(constraints):
            raise ContractError(f"constraint {j} out of range 1..{len(constraints)}")
        c = constraints[j - 1]
        claimed = sel.used
        if tag == "r":
            if not isinstance(c, CardinalityConstraint):
                raise ContractError(f"constraint {j} is not a cardinality constraint")
            residue = c.members - claimed
            if not residue:
                raise ContractError(f"constraint {j} has no unclaimed variables")
            block = ReducedSet(tuple(sorted(residue)), c.target, len(c.members & claimed), j - 1)
        elif tag == "" and isinstance(c, CardinalityConstraint):
            if not c.feasible:
                raise InfeasibleError(f"constraint {j} is infeasible")
            block = SelectedSet(tuple(sorted(c.members)), c.target, "dicke", j - 1)
        else:
            lin = c.as_linear() if isinstance(c, CardinalityConstraint) else c
            odd, parity = parity_set(normalize_linear(lin))
            if not odd:
                raise ContractError(f"constraint {j} carries no parity information")
            block = SelectedSet(tuple(sorted(odd)), parity, "ghz", j - 1)
        if claimed.intersection(block.members):
            raise ContractError(f"set {item} overlaps an earlier set")
        sel = sel.extended(block)
    return sel


def select(constraints: Sequence[Constraint], spec: str, eta: int = 0) -> Selection:
    """Selection for a strategy spec.

    ``uniform``, ``cardinality`` (greedy Hamming-weight blocks with overlap
    threshold ``eta``), ``parity`` (greedy parity blocks), ``mixed`` (both)
    or ``sets:<list>`` (see :func:`_explicit_selection`).
    """
    spec = spec.strip().lower()
    if spec == "uniform":
        return Selection()
    if spec == "cardinality":
        idx = _cardinality_only(constraints)
        if not idx:
            raise ContractError("instance has no cardinality constraints")
        sel = preprocess_cardinality([constraints[j] for j in idx], eta)
        return Selection(
            tuple(SelectedSet(s.members, s.target, s.kind, idx[s.source]) for s in sel.disjoint_sets),
            tuple(ReducedSet(r.members, r.target, r.overlap, idx[r.source]) for r in sel.reduced_sets),
            sel.threshold)
    if spec == "parity":
        lin = [c.as_linear() if isinstance(c, CardinalityConstraint) else c for c in constraints]
        return preprocess_parity(lin)
    if spec == "mixed":
        return preprocess_mixed(constraints, eta)
    if spec.startswith("sets:"):
        items = [s for s in spec[5:].split(",") if s.strip()]
        if not items:
            raise ContractError("empty set list")
        return _explicit_selection(constraints, items)
    raise ContractError(f"unknown strategy {spec!r}")


def make_strategy(inst: CoverInstance, spec: str, eta: int = 0,
                  solutions: SolutionSet | None = None) -> Strategy:
    sel = select(constraints_of(inst), spec, eta)
    name = spec if spec.strip().lower() != "cardinality" else f"cardinality({eta})"
    sols = solutions if solutions is not None else brute_force(inst)
    return Strategy(sel, inst.n, len(sols) or None, name)


def describe_selection(sel: Selection) -> list[str]:
    """Human-readable block list (constraint indices 1-based)."""
    lines = []
    for b in sel.blocks:
        src = "?" if b.source is None else b.source + 1
        members = "{" + ",".join(map(str, b.members)) + "}"
        if isinstance(b, ReducedSet):
            lo, hi = b.weight_range
            lines.append(f"reduced  C{src} -> {members} weight in [{lo},{hi}] (overlap {b.overlap})")
        elif b.kind == "ghz":
            lines.append(f"parity   C{src} -> {members} parity {b.target}")
        else:
            lines.append(f"weight   C{src} -> {members} weight {b.target}")
    return lines


# Experiments ----------------------------------------------------------------

RESULT_HEADER = ("strategy", "kappa", "F", "S", "ideal_prob", "noisy_mean", "noisy_std", "runs", "shots")


@dataclass
class ExperimentRow:
    strategy: str
    kappa: int
    F: int
    S: int
    ideal_prob: float
    noisy_mean: float | None = None
    noisy_std: float | None = None
    runs: int | None = None
    shots: int | None = None

    def as_tuple(self) -> tuple:
        return tuple(getattr(self, k) for k in RESULT_HEADER)


def run_experiment(inst: CoverInstance, spec: str, kappas: Iterable[int] | str = "auto", eta: int = 0,
                   mode: Mode | str = Mode.IDEAL, plan: ShotPlan = DESK_PLAN,
                   noise: NoiseModel | None = None, workers: int | None = None) -> list[ExperimentRow]:
    """Ideal success probability (and optionally noisy solution counts) per query count.

    Noisy counts for every requested ``k`` come from one set of trajectories
    through the deepest circuit, measured at each query boundary.
    """
    sols = brute_force(inst)
    if not sols.bitstrings:
        raise InfeasibleError("instance has no solution")
    strategy = make_strategy(inst, spec, eta, sols)
    f = sols.predicate()
    f_mask = search_space_mask(strategy.selection, inst.n)
    if (f.mask & ~f_mask).any():
        raise ContractError("brute-force solutions fall outside the search space")
    ks = [strategy.kappa_opt] if kappas == "auto" else sorted(set(int(k) for k in kappas))
    if not ks or ks[0] < 0:
        raise ContractError("query counts must be non-negative")
    kmax = ks[-1]
    ideal = run(strategy, f, kmax, Mode.IDEAL).trace
    noisy = None
    if Mode(mode) is Mode.CIRCUIT_NOISY:
        noisy = run(strategy, f, kmax, Mode.CIRCUIT_NOISY, plan, noise, workers).final
    rows = []
    for k in ks:
        row = ExperimentRow(strategy.name, k, strategy.search_space, len(sols), float(ideal[k]))
        if noisy is not None:
            row.noisy_mean, row.noisy_std = noisy.mean(k), noisy.std(k)
            row.runs, row.shots = plan.runs, plan.shots_per_run
        rows.append(row)
    return rows


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_results_csv(rows: Iterable[ExperimentRow], stream=None) -> str:
    buf = stream if stream is not None else io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in row.as_tuple()])
    return buf.getvalue() if stream is None else ""


# Reference instances --------------------------------------------------------

_SUBSETS = ({1, 5}, {1, 3, 6}, {1, 2, 5}, {1, 7}, {3, 4}, {4, 6}, {2, 4, 5}, {2, 7}, {6, 7}, {3, 5, 7})


def reference_instance() -> CoverInstance:
    """Seven elements, ten subsets, unique exact cover {A3, A5, A9}."""
    return CoverInstance([str(u) for u in range(1, 8)], [{str(e) for e in s} for s in _SUBSETS])


def weighted_reference_instance() -> CoverInstance:
    """Same subsets, weight 2 on A3, A6 and A10, every element covered exactly twice."""
    weights = [2 if i in (3, 6, 10) else 1 for i in range(1, 11)]
    return CoverInstance([str(u) for u in range(1, 8)], [{str(e) for e in s} for s in _SUBSETS], weights, 2)


def random_instance(rng: np.random.Generator, n_elements: int, n_subsets: int,
                    max_weight: int = 1, target: int = 1) -> CoverInstance:
    """Seeded random instance in which every element is covered at least once."""
    universe = [f"u{j}" for j in range(1, n_elements + 1)]
    subsets = [set() for _ in range(n_subsets)]
    for u in universe:
        subsets[int(rng.integers(n_subsets))].add(u)
    for s in subsets:
        k = int(rng.integers(1, max(2, math.ceil(n_elements / 2)) + 1))
        s.update(rng.choice(universe, size=min(k, n_elements), replace=False).tolist())
    weights = rng.integers(1, max_weight + 1, size=n_subsets).tolist()
    return CoverInstance(universe, subsets, weights, target)
