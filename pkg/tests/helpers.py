"""Independent reference computations used as test oracles.

Dense matrices here are built from Kronecker products and matrix
exponentials, never from the package's in-place kernels.
"""
from functools import reduce

import numpy as np
from scipy.linalg import expm

from cagrover.simulator import GateKind

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])


def rz(theta):
    return expm(-0.5j * theta * Z)


def ry(theta):
    return expm(-0.5j * theta * Y)


def kron_all(ops):
    return reduce(np.kron, ops, np.eye(1))


def on(op, q, n):
    """Single-qubit ``op`` on qubit ``q`` (qubit 0 most significant)."""
    return kron_all([op if i == q else I2 for i in range(n)])


def controlled(op, controls, target, n):
    """``op`` on ``target`` when every control is 1, as sum of projector products."""
    dim = 2 ** n
    proj = kron_all([P1 if i in controls else I2 for i in range(n)])
    return np.eye(dim) - proj + proj @ on(op, target, n)


def dense_gate(gate, n):
    k, qs = gate.kind, gate.qubits
    if k is GateKind.H:
        return on(H, qs[0], n)
    if k is GateKind.X:
        return on(X, qs[0], n)
    if k is GateKind.Z:
        return on(Z, qs[0], n)
    if k is GateKind.RZ:
        return on(rz(gate.angle), qs[0], n)
    if k is GateKind.RY:
        return on(ry(gate.angle), qs[0], n)
    if k is GateKind.CX:
        return controlled(X, qs[:1], qs[1], n)
    if k is GateKind.CZ:
        return controlled(Z, qs[:1], qs[1], n)
    if k is GateKind.CRY:
        return controlled(ry(gate.angle), qs[:1], qs[1], n)
    if k in (GateKind.CCX, GateKind.MCX):
        return controlled(X, qs[:-1], qs[-1], n)
    if k is GateKind.ORACLE:
        diag = np.ones(2 ** n)
        for idx in range(2 ** n):
            bits = [(idx >> (n - 1 - q)) & 1 for q in qs]
            local = int("".join(map(str, bits)), 2)
            if gate.data[local]:
                diag[idx] = -1
        return np.diag(diag)
    raise NotImplementedError(k)


def dense_unitary(circuit):
    n = circuit.width
    u = np.eye(2 ** n, dtype=complex)
    for g in circuit.gates:
        u = dense_gate(g, n) @ u
    return u


def equal_up_to_phase(a, b, tol=1e-8):
    """True when ``a = e^{i phi} b`` for some phase."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < 1e-12:
        return np.allclose(a, 0, atol=tol)
    phase = a[idx] / b[idx]
    return abs(abs(phase) - 1) < tol and np.allclose(a, phase * b, atol=tol)


def clean_ancilla_block(u, num_data, num_ancillas):
    """Block of ``u`` mapping ancilla-zero inputs to ancilla-zero outputs.

    Also returns the weight leaking into non-zero ancilla outputs.
    """
    step = 2 ** num_ancillas
    cols = u[:, ::step]
    block = cols[::step, :]
    leak = float(np.linalg.norm(cols) ** 2 - np.linalg.norm(block) ** 2)
    return block, leak


def welch_z(a, b):
    """Standardized difference of means ``mean(b) - mean(a)`` (unequal variances)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    se = np.sqrt(a.var(ddof=1) / len(a) + b.var(ddof=1) / len(b))
    diff = b.mean() - a.mean()
    return diff / se if se > 0 else (np.inf if diff > 0 else -np.inf)
