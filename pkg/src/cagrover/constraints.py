"""Linear constraint systems and the greedy preprocessing that selects
jointly implementable (pairwise disjoint) variable sets.

Variable indices are 1-based throughout this module, so variable ``i``
lives on qubit ``i - 1`` once a circuit is built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Literal, Sequence

from .exceptions import ContractError, InfeasibleError


@dataclass(frozen=True)
class CardinalityConstraint:
    """``sum(x_i for i in members) == target``."""

    members: frozenset[int]
    target: int

    def __init__(self, members: Iterable[int], target: int):
        object.__setattr__(self, "members", frozenset(int(i) for i in members))
        object.__setattr__(self, "target", int(target))
        if not self.members:
            raise ContractError("constraint has no members")
        if min(self.members) < 1:
            raise ContractError("variable indices are 1-based")
        if self.target < 0:
            raise ContractError("cardinality target must be non-negative")

    @property
    def feasible(self) -> bool:
        return self.target <= len(self.members)

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        return sum(bits[i - 1] for i in self.members) == self.target

    def as_linear(self) -> LinearConstraint:
        return LinearConstraint({i: 1 for i in self.members}, self.target)


@dataclass(frozen=True)
class LinearConstraint:
    """``sum(coefficients[i] * x_i) == target`` with integer coefficients."""

    coefficients: tuple[tuple[int, int], ...]
    target: int

    def __init__(self, coefficients, target: int):
        items = dict(coefficients).items()
        coeffs = tuple(sorted((int(i), int(a)) for i, a in items))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "target", int(target))
        if not coeffs:
            raise ContractError("constraint has no members")
        if coeffs[0][0] < 1:
            raise ContractError("variable indices are 1-based")

    @property
    def members(self) -> frozenset[int]:
        return frozenset(i for i, _ in self.coefficients)

    @property
    def coefficient_map(self) -> dict[int, int]:
        return dict(self.coefficients)

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        return sum(a * bits[i - 1] for i, a in self.coefficients) == self.target


Constraint = CardinalityConstraint | LinearConstraint


def normalize_linear(c: LinearConstraint) -> LinearConstraint:
    """Divide out the gcd of the coefficients.

    Raises InfeasibleError when that gcd does not divide the target, since
    then no 0/1 assignment can satisfy the constraint.
    """
    g = reduce(math.gcd, (abs(a) for _, a in c.coefficients))
    if g == 0:
        if c.target != 0:
            raise InfeasibleError(f"all coefficients vanish but target is {c.target}")
        return c
    if c.target % g:
        raise InfeasibleError(f"gcd {g} of coefficients does not divide target {c.target}")
    if g == 1:
        return c
    return LinearConstraint({i: a // g for i, a in c.coefficients}, c.target // g)


def parity_set(c: LinearConstraint) -> tuple[frozenset[int], int]:
    """Variables with odd coefficient, and the parity their sum must have."""
    odd = frozenset(i for i, a in c.coefficients if a % 2)
    parity = c.target % 2
    if not odd and parity:
        raise InfeasibleError("even left-hand side cannot equal an odd target")
    return odd, parity


# Selection ------------------------------------------------------------------

BlockKind = Literal["dicke", "ghz"]


@dataclass(frozen=True)
class SelectedSet:
    """A disjoint block: Hamming weight ``target`` (dicke) or parity ``target`` (ghz)."""

    members: tuple[int, ...]
    target: int
    kind: BlockKind
    source: int | None = None  # index into the input constraint list

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ReducedSet:
    """Residue of an overlapping cardinality constraint.

    The constraint's variables already claimed by earlier blocks are
    dropped; ``overlap`` of them were removed, so the residue's weight may
    lie anywhere in ``weight_range``.
    """

    members: tuple[int, ...]
    target: int
    overlap: int
    source: int | None = None

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def weight_range(self) -> tuple[int, int]:
        return max(0, self.target - self.overlap), min(self.target, len(self.members))

    @property
    def omega(self) -> int:
        lo, hi = self.weight_range
        return sum(math.comb(len(self.members), w) for w in range(lo, hi + 1))


@dataclass(frozen=True)
class Selection:
    disjoint_sets: tuple[SelectedSet, ...] = ()
    reduced_sets: tuple[ReducedSet, ...] = ()
    threshold: int = 0

    def __post_init__(self):
        seen: set[int] = set()
        for block in self.blocks:
            if not block.members:
                raise ContractError("selected sets must be non-empty")
            if seen.intersection(block.members):
                raise ContractError("selected sets overlap")
            seen.update(block.members)
        for r in self.reduced_sets:
            if r.overlap > self.threshold:
                raise ContractError(f"reduced set overlap {r.overlap} exceeds threshold {self.threshold}")

    @property
    def blocks(self) -> tuple[SelectedSet | ReducedSet, ...]:
        return self.disjoint_sets + self.reduced_sets

    @property
    def used(self) -> frozenset[int]:
        return frozenset(i for b in self.blocks for i in b.members)

    def permutation(self, n: int) -> dict[int, int]:
        """Original variable index -> 0-based position after grouping blocks first."""
        order = [i for b in self.blocks for i in b.members]
        order += [i for i in range(1, n + 1) if i not in self.used]
        return {i: pos for pos, i in enumerate(order)}

    def extended(self, block: SelectedSet | ReducedSet) -> Selection:
        if isinstance(block, ReducedSet):
            return Selection(self.disjoint_sets, self.reduced_sets + (block,),
                             max(self.threshold, block.overlap))
        return Selection(self.disjoint_sets + (block,), self.reduced_sets, self.threshold)


def _restriction_ratio(c: CardinalityConstraint) -> Fraction:
    return Fraction(math.comb(len(c.members), c.target), 2 ** len(c.members))


def preprocess_cardinality(constraints: Sequence[CardinalityConstraint], threshold: int = 0,
                           used: Iterable[int] = ()) -> Selection:
    """Greedy selection of disjoint cardinality blocks.

    Constraints are scanned from most to least restrictive (ascending
    ``C(|C|, b) / 2**|C|``, ties by input position).  Phase 1 keeps every
    constraint disjoint from those already kept.  When ``threshold > 0`` a
    second pass keeps the unclaimed part of any remaining constraint that
    overlaps the claimed variables in at most ``threshold`` places.
    """
    if threshold < 0:
        raise ContractError("threshold must be non-negative")
    for c in constraints:
        if not c.feasible:
            raise InfeasibleError(f"target {c.target} exceeds constraint size {len(c.members)}")
    order = sorted(range(len(constraints)), key=lambda j: _restriction_ratio(constraints[j]))
    claimed = set(used)
    chosen: list[SelectedSet] = []
    taken: set[int] = set()
    for j in order:
        c = constraints[j]
        if claimed.isdisjoint(c.members):
            chosen.append(SelectedSet(tuple(sorted(c.members)), c.target, "dicke", j))
            claimed |= c.members
            taken.add(j)
    reduced: list[ReducedSet] = []
    if threshold > 0:
        for j in order:
            if j in taken:
                continue
            c = constraints[j]
            overlap = len(c.members & claimed)
            if overlap > threshold:
                continue
            residue = c.members - claimed
            if residue:
                reduced.append(ReducedSet(tuple(sorted(residue)), c.target, overlap, j))
                claimed |= residue
    return Selection(tuple(chosen), tuple(reduced), threshold)


def preprocess_parity(constraints: Sequence[LinearConstraint], used: Iterable[int] = (),
                      selection: Selection | None = None) -> Selection:
    """Greedy selection of disjoint parity blocks, smallest first.

    Each constraint is normalized and reduced modulo 2; constraints whose
    odd-coefficient set is empty carry no parity information and are
    skipped.  Blocks are appended to ``selection`` when given.
    """
    sets = []
    for j, c in enumerate(constraints):
        odd, parity = parity_set(normalize_linear(c))
        if odd:
            sets.append((j, odd, parity))
    sets.sort(key=lambda item: len(item[1]))
    base = selection if selection is not None else Selection()
    claimed = set(used) | set(base.used)
    chosen = list(base.disjoint_sets)
    for j, odd, parity in sets:
        if claimed.isdisjoint(odd):
            chosen.append(SelectedSet(tuple(sorted(odd)), parity, "ghz", j))
            claimed |= odd
    return Selection(tuple(chosen), base.reduced_sets, base.threshold)


def preprocess_mixed(constraints: Sequence[Constraint], threshold: int = 0) -> Selection:
    """Cardinality blocks first, then parity blocks on what is left.

    Source indices refer to positions in ``constraints``.
    """
    card_idx = [j for j, c in enumerate(constraints) if isinstance(c, CardinalityConstraint)]
    lin_idx = [j for j, c in enumerate(constraints) if isinstance(c, LinearConstraint)]
    card = preprocess_cardinality([constraints[j] for j in card_idx], threshold)
    card = _reindex(card, card_idx)
    mixed = preprocess_parity([constraints[j] for j in lin_idx], selection=card)
    n_card = len(card.disjoint_sets)
    ghz = tuple(SelectedSet(s.members, s.target, s.kind, lin_idx[s.source])
                for s in mixed.disjoint_sets[n_card:])
    return Selection(card.disjoint_sets + ghz, card.reduced_sets, card.threshold)


def _reindex(sel: Selection, index_map: Sequence[int]) -> Selection:
    return Selection(
        tuple(SelectedSet(s.members, s.target, s.kind, index_map[s.source]) for s in sel.disjoint_sets),
        tuple(ReducedSet(r.members, r.target, r.overlap, index_map[r.source]) for r in sel.reduced_sets),
        sel.threshold,
    )


# Search space arithmetic ----------------------------------------------------

def block_size(block: SelectedSet | ReducedSet) -> int:
    """Number of bitstrings on the block's variables allowed by the block."""
    if isinstance(block, ReducedSet):
        return block.omega
    if block.kind == "ghz":
        return 2 ** (block.size - 1)
    return math.comb(block.size, block.target)


def search_space_size(selection: Selection, n: int) -> int:
    used = selection.used
    if used and max(used) > n:
        raise ContractError(f"selection uses variable {max(used)} beyond n={n}")
    size = 2 ** (n - len(used))
    for block in selection.blocks:
        size *= block_size(block)
    return size


def optimal_queries(f_size: int, s_size: int) -> int:
    """Query count that brings the solution amplitude closest to one."""
    if not 1 <= s_size <= f_size:
        raise ContractError(f"need 1 <= |S| <= |F|, got |S|={s_size}, |F|={f_size}")
    theta = math.asin(math.sqrt(s_size / f_size))
    # round half up
    return math.floor((math.pi / (4 * theta) - 0.5) + 0.5)


@dataclass(frozen=True)
class Strategy:
    """A selection together with the search-space arithmetic it implies."""

    selection: Selection
    n: int
    search_space: int = field(init=False)
    solutions: int | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "search_space", search_space_size(self.selection, self.n))
        if self.solutions is not None and not 1 <= self.solutions <= self.search_space:
            raise ContractError(f"|S|={self.solutions} incompatible with |F|={self.search_space}")

    @property
    def kappa_opt(self) -> int | None:
        if self.solutions is None:
            return None
        return optimal_queries(self.search_space, self.solutions)

    @property
    def reduction_factor(self) -> Fraction:
        return Fraction(2 ** self.n, self.search_space)

    def with_solutions(self, solutions: int) -> Strategy:
        return Strategy(self.selection, self.n, solutions, self.name)


def membership(selection: Selection, n: int):
    """Predicate on bit tuples: does the string lie in the selection's search space?"""
    def accepts(bits: Sequence[int]) -> bool:
        for block in selection.blocks:
            w = sum(bits[i - 1] for i in block.members)
            if isinstance(block, ReducedSet):
                lo, hi = block.weight_range
                if not lo <= w <= hi:
                    return False
            elif block.kind == "ghz":
                if w % 2 != block.target:
                    return False
            elif w != block.target:
                return False
        return True
    return accepts
