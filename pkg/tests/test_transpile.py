import math

import numpy as np
import pytest

from cagrover.exceptions import TranspileError
from cagrover.grover import diffusion_circuit
from cagrover.simulator import (Circuit, GateKind, ccx, cry, cx, cz, h, mcx, oracle, prepare, ry, rz, x, z)
from cagrover.stateprep import dicke1_circuit, dicke11_circuit, ghz_x_circuit
from cagrover.transpile import BASIS, is_transpiled, lower, transpile, vchain, vchain_ancillas

from helpers import H, X, clean_ancilla_block, dense_unitary, equal_up_to_phase, rz as rz_matrix


def check_equivalent(circ):
    t = transpile(circ)
    assert is_transpiled(t)
    extra = t.width - circ.width
    block, leak = clean_ancilla_block(dense_unitary(t), circ.width, extra)
    assert leak < 1e-16 + 1e-8
    assert equal_up_to_phase(block, dense_unitary(circ), tol=1e-8)
    return t


def test_cnot_is_unchanged():
    (g,) = lower(cx(0, 1))
    assert g.kind is GateKind.CX and g.qubits == (0, 1)


def test_x_identity_up_to_phase():
    assert equal_up_to_phase(H @ rz_matrix(math.pi) @ H, X)
    kinds = [g.kind for g in lower(x(0))]
    assert kinds == [GateKind.H, GateKind.RZ, GateKind.H]


@pytest.mark.parametrize("gate", [h(0), x(1), z(2), rz(0, 0.3), ry(1, 1.1), cx(0, 2), cz(2, 0),
                                  cry(1, 2, -0.8), ccx(0, 1, 2), ccx(2, 0, 1)])
def test_single_gates(gate):
    check_equivalent(Circuit(3, [gate]))


def test_toffoli_counts():
    basis = lower(ccx(0, 1, 2))
    assert len(basis) == 15
    assert sum(g.kind is GateKind.CX for g in basis) == 6


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_mcx(k):
    t = check_equivalent(Circuit(k + 1, [mcx(range(k), k)]))
    assert t.width == k + 1 + vchain_ancillas(k)


def test_vchain_shape():
    rungs = vchain(range(5), 5, [6, 7, 8])
    assert len(rungs) == 2 * 5 - 3
    assert all(g.kind is GateKind.CCX for g in rungs)
    with pytest.raises(TranspileError):
        vchain(range(5), 5, [6])


BUILDERS = [dicke1_circuit(mu) for mu in range(1, 6)] + [dicke11_circuit(mu) for mu in range(1, 6)] \
    + [ghz_x_circuit(mu, p) for mu in range(1, 6) for p in (0, 1)]


@pytest.mark.parametrize("circ", BUILDERS)
def test_builder_circuits(circ):
    check_equivalent(circ)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_diffusion_circuits(n):
    check_equivalent(diffusion_circuit(Circuit(n, [h(q) for q in range(n)]), n))


def test_oracle_passes_through_and_units_cover_output():
    circ = Circuit(4, [x(0), oracle([0, 1, 2], [0, 1, 0, 0, 0, 0, 0, 1]), mcx([0, 1, 2], 3)])
    t = transpile(circ)
    assert t.gates[3].kind is GateKind.ORACLE
    assert len(t.units) == 1 + 1 + 3
    spans = [(lo, hi) for _, lo, hi in t.units]
    assert spans[0][0] == 0 and spans[-1][1] == len(t.gates)
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))
    assert all(g.kind in BASIS or g.kind is GateKind.ORACLE for g in t.gates)


def test_prepare_is_rejected():
    with pytest.raises(TranspileError):
        transpile(Circuit(2, [prepare([0, 1], np.array([1, 1, 1, 1]) / 2)]))
