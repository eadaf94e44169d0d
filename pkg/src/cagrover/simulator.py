"""Dense statevector simulation over a small fixed gate set.

Qubit ``q`` (0-based; the first qubit of a register is ``q = 0``) is the
most significant bit of the basis index, so the index of a basis state
written as a bitstring ``b_0 b_1 ... b_{n-1}`` is ``int(bitstring, 2)``.

All gate kernels work on a batched tensor of shape ``(B, 2, ..., 2)`` where
the leading axis enumerates independent states and qubit ``q`` lives on
axis ``q + 1``.  Kernels update the tensor in place through views; no
full-register matrix is ever built.
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .exceptions import CapacityError, ContractError

MAX_QUBITS = 24
_SQRT1_2 = 1.0 / math.sqrt(2.0)


class GateKind(str, enum.Enum):
    H = "h"
    X = "x"
    Z = "z"
    RZ = "rz"
    RY = "ry"
    CX = "cx"
    CZ = "cz"
    CRY = "cry"
    CCX = "ccx"
    MCX = "mcx"
    # Ideal phase oracle; ``data`` holds a boolean mask over the basis of ``qubits``.
    ORACLE = "oracle"
    # Householder reflection sending |0...0> to the real unit vector in ``data``.
    PREPARE = "prepare"


_ARITY = {
    GateKind.H: 1, GateKind.X: 1, GateKind.Z: 1, GateKind.RZ: 1, GateKind.RY: 1,
    GateKind.CX: 2, GateKind.CZ: 2, GateKind.CRY: 2, GateKind.CCX: 3,
}
_ROTATIONS = {GateKind.RZ, GateKind.RY, GateKind.CRY}
_SELF_INVERSE = {
    GateKind.H, GateKind.X, GateKind.Z, GateKind.CX, GateKind.CZ,
    GateKind.CCX, GateKind.MCX, GateKind.ORACLE, GateKind.PREPARE,
}


@dataclass(frozen=True, eq=False)
class Gate:
    """One gate application.

    For controlled kinds the controls come first in ``qubits`` and the target
    is last.  ``angle`` is set only for rotations; ``data`` only for the
    oracle mask and the prepared amplitude block.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None
    data: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        qs = self.qubits
        if not qs:
            raise ContractError(f"{kind.value}: no qubits given")
        if len(set(qs)) != len(qs) or min(qs) < 0:
            raise ContractError(f"{kind.value}: qubit indices must be distinct and non-negative, got {qs}")
        if kind in _ARITY and len(qs) != _ARITY[kind]:
            raise ContractError(f"{kind.value} acts on {_ARITY[kind]} qubits, got {len(qs)}")
        if kind is GateKind.MCX and len(qs) < 2:
            raise ContractError("mcx needs at least one control")
        if kind in _ROTATIONS:
            if self.angle is None or not math.isfinite(self.angle):
                raise ContractError(f"{kind.value}: angle must be finite")
        if kind in (GateKind.ORACLE, GateKind.PREPARE):
            if self.data is None or len(self.data) != 2 ** len(qs):
                raise ContractError(f"{kind.value}: data must have length 2**{len(qs)}")

    @property
    def num_controls(self) -> int:
        if self.kind in (GateKind.CX, GateKind.CZ, GateKind.CRY):
            return 1
        if self.kind is GateKind.CCX:
            return 2
        if self.kind is GateKind.MCX:
            return len(self.qubits) - 1
        return 0

    def inverse(self) -> Gate:
        if self.kind in _SELF_INVERSE:
            return self
        return Gate(self.kind, self.qubits, -self.angle)

    def remap(self, mapping) -> Gate:
        """Same gate on relabelled qubits (``mapping[q]`` is the new index)."""
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.angle, self.data)

    def __repr__(self):
        angle = "" if self.angle is None else f", {self.angle:.6g}"
        return f"{self.kind.value}({', '.join(map(str, self.qubits))}{angle})"


# Gate factories -------------------------------------------------------------

def h(q): return Gate(GateKind.H, (q,))
def x(q): return Gate(GateKind.X, (q,))
def z(q): return Gate(GateKind.Z, (q,))
def rz(q, angle): return Gate(GateKind.RZ, (q,), float(angle))
def ry(q, angle): return Gate(GateKind.RY, (q,), float(angle))
def cx(control, target): return Gate(GateKind.CX, (control, target))
def cz(a, b): return Gate(GateKind.CZ, (a, b))
def cry(control, target, angle): return Gate(GateKind.CRY, (control, target), float(angle))
def ccx(c1, c2, target): return Gate(GateKind.CCX, (c1, c2, target))


def mcx(controls: Sequence[int], target: int) -> Gate:
    return Gate(GateKind.MCX, (*controls, target))


def oracle(qubits: Sequence[int], mask) -> Gate:
    """Phase oracle flipping the sign of basis states where ``mask`` is true."""
    return Gate(GateKind.ORACLE, tuple(qubits), data=np.asarray(mask, dtype=bool))


def prepare(qubits: Sequence[int], amplitudes) -> Gate:
    """Unitary mapping ``|0...0>`` of ``qubits`` onto the real vector ``amplitudes``."""
    amps = np.asarray(amplitudes, dtype=float)
    if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
        raise ContractError("prepared amplitudes must be normalized")
    return Gate(GateKind.PREPARE, tuple(qubits), data=amps)


# Circuits -------------------------------------------------------------------

@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``width`` qubits.

    Qubits at index ``ancilla_offset`` and above are ancillas: they start
    and (ideally) end in ``|0>`` and are not part of measured outcomes.
    ``units`` is filled in by the transpiler and records, for each source
    gate, the slice of basis gates it expanded into.
    """

    width: int
    gates: tuple[Gate, ...] = ()
    ancilla_offset: int | None = None
    units: tuple[tuple[Gate, int, int], ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        if self.ancilla_offset is None:
            object.__setattr__(self, "ancilla_offset", self.width)
        if self.width < 1:
            raise ContractError("circuit width must be positive")
        if not 0 <= self.ancilla_offset <= self.width:
            raise ContractError("ancilla_offset must lie in [0, width]")
        for g in self.gates:
            if max(g.qubits) >= self.width:
                raise ContractError(f"{g!r} does not fit in width {self.width}")

    @property
    def num_data(self) -> int:
        return self.ancilla_offset

    def __len__(self):
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if not isinstance(other, Circuit):
            return NotImplemented
        return Circuit(max(self.width, other.width), self.gates + other.gates,
                       min(self.ancilla_offset, other.ancilla_offset))

    def inverse(self) -> Circuit:
        return Circuit(self.width, tuple(g.inverse() for g in reversed(self.gates)), self.ancilla_offset)


# States ---------------------------------------------------------------------

@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 ** self.num_qubits,):
            raise ContractError(f"expected {2 ** self.num_qubits} amplitudes, got {self.amplitudes.shape}")

    def copy(self) -> StateVector:
        return StateVector(self.num_qubits, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def marginal(self, num_data: int) -> np.ndarray:
        """Outcome distribution of the leading ``num_data`` qubits."""
        p = self.probabilities()
        return p.reshape(2 ** num_data, -1).sum(axis=1)


def _check_width(n: int):
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"register size {n} outside [1, {MAX_QUBITS}]")


def new_zero_state(n: int) -> StateVector:
    _check_width(n)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = 1.0
    return StateVector(n, amps)


def state_from_amplitudes(amplitudes) -> StateVector:
    amps = np.asarray(amplitudes, dtype=complex)
    n = int(round(math.log2(len(amps))))
    _check_width(n)
    return StateVector(n, amps.copy())


def bitstring(index: int, n: int) -> str:
    return format(index, f"0{n}b")


# Kernels --------------------------------------------------------------------

def _pair(t: np.ndarray, axis: int):
    head = (slice(None),) * axis
    return t[head + (0,)], t[head + (1,)]


def _controlled_view(t: np.ndarray, controls: Iterable[int], target: int):
    """View of ``t`` restricted to controls = 1, and the target's axis in it."""
    controls = tuple(controls)
    n = t.ndim - 1
    index = [slice(None)] * (n + 1)
    for c in controls:
        index[c + 1] = 1
    sub = t[tuple(index)]
    axis = 1 + target - sum(1 for c in controls if c < target)
    return sub, axis


def _swap(a0, a1):
    tmp = a0.copy()
    a0[...] = a1
    a1[...] = tmp


def _matrix_1q(a0, a1, m):
    new0 = m[0, 0] * a0 + m[0, 1] * a1
    a1[...] = m[1, 0] * a0 + m[1, 1] * a1
    a0[...] = new0


def _ry_matrix(angle):
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def _apply_1q(t, axis, kind, angle):
    a0, a1 = _pair(t, axis)
    if kind is GateKind.X:
        _swap(a0, a1)
    elif kind is GateKind.Z:
        a1 *= -1
    elif kind is GateKind.H:
        s = a0 + a1
        a1[...] = (a0 - a1) * _SQRT1_2
        a0[...] = s * _SQRT1_2
    elif kind is GateKind.RZ:
        a0 *= np.exp(-0.5j * angle)
        a1 *= np.exp(0.5j * angle)
    elif kind is GateKind.RY:
        _matrix_1q(a0, a1, _ry_matrix(angle))
    else:  # pragma: no cover - guarded by callers
        raise ContractError(f"not a one-qubit kind: {kind}")


def _apply_dense(t, qubits, matrix):
    """Apply a ``2^k x 2^k`` matrix on ``qubits`` (first listed = most significant)."""
    k = len(qubits)
    moved = np.moveaxis(t, [q + 1 for q in qubits], list(range(1, k + 1)))
    flat = moved.reshape(moved.shape[0], 2 ** k, -1)
    moved[...] = np.einsum("ij,bjr->bir", matrix, flat).reshape(moved.shape)


def _apply_phase_mask(t, qubits, mask):
    k = len(qubits)
    sign = np.where(np.asarray(mask, dtype=bool), -1.0, 1.0).reshape((2,) * k)
    order = np.argsort(qubits)
    sign = np.transpose(sign, order)
    shape = [1] * t.ndim
    for q in qubits:
        shape[q + 1] = 2
    t *= sign.reshape(shape)


def _apply_householder(t, qubits, amplitudes):
    k = len(qubits)
    w = -np.asarray(amplitudes, dtype=float)
    w[0] += 1.0
    norm2 = float(w @ w)
    if norm2 < 1e-30:
        return
    moved = np.moveaxis(t, [q + 1 for q in qubits], list(range(1, k + 1)))
    flat = moved.reshape(moved.shape[0], 2 ** k, -1)
    proj = np.einsum("j,bjr->br", w, flat) * (2.0 / norm2)
    moved[...] = (flat - w[None, :, None] * proj[:, None, :]).reshape(moved.shape)


def apply_gate_tensor(t: np.ndarray, gate: Gate) -> None:
    """Apply ``gate`` in place to a batched tensor of shape ``(B, 2, ..., 2)``."""
    kind, qs = gate.kind, gate.qubits
    if kind in (GateKind.H, GateKind.X, GateKind.Z, GateKind.RZ, GateKind.RY):
        _apply_1q(t, qs[0] + 1, kind, gate.angle)
    elif kind in (GateKind.CX, GateKind.CCX, GateKind.MCX):
        sub, axis = _controlled_view(t, qs[:-1], qs[-1])
        _swap(*_pair(sub, axis))
    elif kind is GateKind.CZ:
        sub, axis = _controlled_view(t, qs[:1], qs[1])
        _pair(sub, axis)[1][...] *= -1
    elif kind is GateKind.CRY:
        sub, axis = _controlled_view(t, qs[:1], qs[1])
        _matrix_1q(*_pair(sub, axis), _ry_matrix(gate.angle))
    elif kind is GateKind.ORACLE:
        _apply_phase_mask(t, qs, gate.data)
    elif kind is GateKind.PREPARE:
        _apply_householder(t, qs, gate.data)
    else:  # pragma: no cover
        raise ContractError(f"unsupported gate kind {kind}")


def _as_tensor(amplitudes: np.ndarray, n: int) -> np.ndarray:
    return amplitudes.reshape((1,) + (2,) * n)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    if max(gate.qubits) >= state.num_qubits:
        raise ContractError(f"{gate!r} out of range for {state.num_qubits} qubits")
    out = state.copy()
    apply_gate_tensor(_as_tensor(out.amplitudes, out.num_qubits), gate)
    return out


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.width != state.num_qubits:
        raise ContractError(f"circuit width {circuit.width} != state width {state.num_qubits}")
    out = state.copy()
    t = _as_tensor(out.amplitudes, out.num_qubits)
    for g in circuit.gates:
        apply_gate_tensor(t, g)
    return out


def run_circuit(circuit: Circuit) -> StateVector:
    """Apply ``circuit`` to the all-zero state of its width."""
    return apply_circuit(new_zero_state(circuit.width), circuit)


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a (small) circuit; column ``j`` is the image of ``|j>``."""
    n = circuit.width
    if n > 12:
        raise CapacityError("dense unitaries are limited to 12 qubits")
    t = np.eye(2 ** n, dtype=complex).reshape((2 ** n,) + (2,) * n)
    for g in circuit.gates:
        apply_gate_tensor(t, g)
    return t.reshape(2 ** n, 2 ** n).T


def gate_matrix(gate: Gate, width: int | None = None) -> np.ndarray:
    width = width if width is not None else max(gate.qubits) + 1
    return circuit_unitary(Circuit(width, (gate,)))


# Measurement ----------------------------------------------------------------

def sample_indices(probabilities: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw of basis indices for each uniform in ``uniforms``."""
    cdf = np.cumsum(probabilities)
    idx = np.searchsorted(cdf, uniforms * cdf[-1], side="right")
    return np.minimum(idx, len(cdf) - 1)


def sample(state: StateVector, shots: int, seed: int, num_data: int | None = None) -> dict[str, int]:
    """Measure ``shots`` times in the computational basis.

    Returns a histogram keyed by bitstrings (first qubit leftmost).  With
    ``num_data`` only the leading qubits are measured.
    """
    if shots < 1:
        raise ContractError("shots must be >= 1")
    n = state.num_qubits if num_data is None else num_data
    probs = state.probabilities() if num_data is None else state.marginal(num_data)
    rng = np.random.default_rng(seed)
    idx = sample_indices(probs, rng.random(shots))
    counts = Counter(idx.tolist())
    return {bitstring(i, n): c for i, c in sorted(counts.items())}


def predicate_mask(n: int, predicate: Callable[[str], bool] | np.ndarray) -> np.ndarray:
    """Boolean mask over the ``2**n`` basis states accepted by ``predicate``."""
    if isinstance(predicate, np.ndarray):
        mask = predicate.astype(bool)
        if mask.shape != (2 ** n,):
            raise ContractError(f"mask must have length {2 ** n}")
        return mask
    return np.fromiter((bool(predicate(bitstring(i, n))) for i in range(2 ** n)), dtype=bool, count=2 ** n)


def probability_of(state: StateVector, predicate, num_data: int | None = None) -> float:
    """Probability that a measurement yields a string accepted by ``predicate``."""
    n = state.num_qubits if num_data is None else num_data
    probs = state.probabilities() if num_data is None else state.marginal(num_data)
    p = float(probs[predicate_mask(n, predicate)].sum())
    return min(max(p, 0.0), 1.0)
