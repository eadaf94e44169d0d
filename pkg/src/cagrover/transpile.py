"""Lowering to the {RZ, H, CNOT} basis.

Multi-controlled X gates go through a V-chain of Toffolis on clean
ancillas appended after the circuit's qubits; each Toffoli then becomes
the textbook 6-CNOT network.  Every rewrite is exact up to a global phase.
"""
from __future__ import annotations

import math
from typing import Sequence

from .exceptions import TranspileError
from .simulator import Circuit, Gate, GateKind, ccx, cx, h, rz

BASIS = frozenset({GateKind.RZ, GateKind.H, GateKind.CX})
_T = math.pi / 4


def vchain_ancillas(num_controls: int) -> int:
    return max(0, num_controls - 2)


def vchain(controls: Sequence[int], target: int, ancillas: Sequence[int]) -> list[Gate]:
    """Toffoli ladder for an X on ``target`` controlled by all of ``controls``.

    Uses ``len(controls) - 2`` clean ancillas and ``2k - 3`` Toffolis for
    ``k >= 2`` controls; the ancillas are returned to ``|0>``.
    """
    k = len(controls)
    if k == 0:
        raise TranspileError("multi-controlled X needs at least one control")
    if k == 1:
        return [cx(controls[0], target)]
    if k == 2:
        return [ccx(controls[0], controls[1], target)]
    need = vchain_ancillas(k)
    if len(ancillas) < need:
        raise TranspileError(f"{k} controls need {need} ancillas, got {len(ancillas)}")
    anc = list(ancillas[:need])
    compute = [ccx(controls[0], controls[1], anc[0])]
    for i in range(2, k - 1):
        compute.append(ccx(controls[i], anc[i - 2], anc[i - 1]))
    return compute + [ccx(controls[-1], anc[-1], target)] + compute[::-1]


def toffoli_basis(a: int, b: int, c: int) -> list[Gate]:
    """Standard 15-gate Toffoli network (T = RZ(pi/4) up to phase)."""
    return [
        h(c), cx(b, c), rz(c, -_T), cx(a, c), rz(c, _T), cx(b, c), rz(c, -_T), cx(a, c),
        rz(b, _T), rz(c, _T), h(c), cx(a, b), rz(a, _T), rz(b, -_T), cx(a, b),
    ]


def _ry_basis(q: int, angle: float) -> list[Gate]:
    # RY = S RX S^dagger and RX = H RZ H
    return [rz(q, -math.pi / 2), h(q), rz(q, angle), h(q), rz(q, math.pi / 2)]


def lower(gate: Gate) -> list[Gate]:
    """Basis expansion of a single gate other than a multi-controlled X."""
    k, qs = gate.kind, gate.qubits
    if k in BASIS or k is GateKind.ORACLE:
        return [gate]
    if k is GateKind.X:
        return [h(qs[0]), rz(qs[0], math.pi), h(qs[0])]
    if k is GateKind.Z:
        return [rz(qs[0], math.pi)]
    if k is GateKind.RY:
        return _ry_basis(qs[0], gate.angle)
    if k is GateKind.CZ:
        return [h(qs[1]), cx(qs[0], qs[1]), h(qs[1])]
    if k is GateKind.CRY:
        c, t = qs
        return [rz(t, -math.pi / 2), h(t), rz(t, gate.angle / 2), cx(c, t),
                rz(t, -gate.angle / 2), cx(c, t), h(t), rz(t, math.pi / 2)]
    if k is GateKind.CCX:
        return toffoli_basis(*qs)
    if k is GateKind.PREPARE:
        raise TranspileError("state-injection blocks have no gate decomposition")
    raise TranspileError(f"cannot lower {gate!r}")


def expand_mcx(gate: Gate, ancillas: Sequence[int]) -> list[Gate]:
    """Toffoli/CNOT ladder for an MCX gate (not yet lowered to the basis)."""
    return vchain(gate.qubits[:-1], gate.qubits[-1], ancillas)


def required_ancillas(circuit: Circuit) -> int:
    return max((vchain_ancillas(g.num_controls) for g in circuit.gates if g.kind is GateKind.MCX), default=0)


def transpile(circuit: Circuit) -> Circuit:
    """Rewrite ``circuit`` over {RZ, H, CNOT}; oracle gates pass through.

    The result keeps the input's data qubits and ancilla offset, appends any
    ancillas the V-chains need, and records in ``units`` which slice of the
    output each Toffoli/CNOT rung or original gate produced.
    """
    extra = required_ancillas(circuit)
    width = circuit.width + extra
    ancillas = list(range(circuit.width, width))
    out: list[Gate] = []
    units: list[tuple[Gate, int, int]] = []
    for g in circuit.gates:
        rungs = expand_mcx(g, ancillas) if g.kind is GateKind.MCX else [g]
        for rung in rungs:
            start = len(out)
            out += lower(rung)
            units.append((rung, start, len(out)))
    return Circuit(width, out, circuit.ancilla_offset, units=tuple(units))


def is_transpiled(circuit: Circuit) -> bool:
    return all(g.kind in BASIS or g.kind is GateKind.ORACLE for g in circuit.gates)
