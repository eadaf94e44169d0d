import math

import numpy as np
import pytest

from cagrover.exact_cover import make_strategy
from cagrover.exceptions import ContractError
from cagrover.grover import grover_circuit, success_probability
from cagrover.noise import (COUNT_HEADER, BranchState, NoiseModel, ShotPlan, _Program, count_rows, run_noisy,
                            run_seed, write_counts_csv)
from cagrover.simulator import (Circuit, apply_gate, bitstring, cx, h, mcx, new_zero_state, ry, run_circuit,
                                sample, x)
from cagrover.stateprep import build_initializer
from cagrover.transpile import transpile

from helpers import X, Y, Z, dense_gate, on, welch_z

PAULI = {1: X, 2: Y, 3: Z}


def cover_circuit(cover, cover_solutions, spec, eta, kappa):
    s = make_strategy(cover, spec, eta)
    f = cover_solutions.predicate()
    init, _ = build_initializer(s, allow_injection=False)
    return transpile(grover_circuit(init, f, kappa)), f


def test_model_and_plan_validation():
    with pytest.raises(ContractError):
        NoiseModel(-0.1, 0)
    with pytest.raises(ContractError):
        NoiseModel(0, 1.5)
    with pytest.raises(ContractError):
        ShotPlan(0, 10)


def test_zero_noise_matches_sampling(cover, cover_solutions):
    circ, f = cover_circuit(cover, cover_solutions, "uniform", 0, 3)
    plan = ShotPlan(4, 300, 11)
    res = run_noisy(circ, plan, NoiseModel(), f.mask)
    dense = run_circuit(circ)
    sol = bitstring(int(np.flatnonzero(f.mask)[0]), 10)
    for r in range(plan.runs):
        hist = sample(dense, plan.shots_per_run, run_seed(plan.seed, r), num_data=10)
        assert res.counts[r, -1] == hist.get(sol, 0)
    assert res.errored.sum() == 0


def test_branch_state_tracks_dense_simulation(rng):
    circ = transpile(Circuit(6, [h(0), h(1), h(2), ry(3, 0.4), mcx([0, 1, 2, 3], 4), h(4), mcx([4, 1, 3], 5)],
                             ancilla_offset=6))
    width = circ.width
    for trial in range(20):
        errs = sorted((int(p), int(c)) for p, c in zip(rng.choice(len(circ.gates), 3, replace=False),
                                                     rng.integers(1, 16, 3)))
        # dense oracle: basis gates with Paulis inserted
        psi = np.zeros(2 ** width, dtype=complex)
        psi[0] = 1
        err_at = dict(errs)
        for pos, g in enumerate(circ.gates):
            psi = dense_gate(g, width) @ psi
            if pos in err_at:
                code = err_at[pos]
                if len(g.qubits) == 1:
                    code = code % 3 + 1
                    psi = on(PAULI[code], g.qubits[0], width) @ psi
                else:
                    a, b = divmod(code, 4)
                    for q, c in ((g.qubits[0], a), (g.qubits[1], b)):
                        if c:
                            psi = on(PAULI[c], q, width) @ psi
        expected = (np.abs(psi) ** 2).reshape(2 ** 6, -1).sum(axis=1)
        prog = _Program.build(circ, np.zeros(64, bool), strict=True)
        fixed = [(p, (c % 3 + 1) if len(circ.gates[p].qubits) == 1 else c) for p, c in errs]
        first, dists = prog.trajectory(fixed)
        assert first == 0
        assert np.allclose(dists[-1], expected, atol=1e-12)


def test_branch_state_dense_roundtrip():
    s = BranchState.zero(2, 2)
    gates = (h(0), x(3), cx(0, 2), mcx([0, 3], 1), h(2))
    for g in gates:
        s.apply(g)
    ref = new_zero_state(4)
    for g in gates:
        ref = apply_gate(ref, g)
    assert np.allclose(s.dense(), ref.amplitudes)


def test_fully_depolarized_hadamard_is_uniform():
    res = run_noisy(Circuit(1, [h(0)]), ShotPlan(1, 10_000, 5), NoiseModel(1.0, 0.0), lambda b: b == "1")
    ones = res.counts[0, -1]
    assert abs(ones - 5000) < 5 * math.sqrt(10_000 * 0.25)
    assert res.errored[0] == 10_000


def test_fully_depolarized_x_gate():
    # X then a uniform Pauli: X or Y undo the flip, Z keeps it, so P(1) = 1/3.
    res = run_noisy(Circuit(1, [x(0)]), ShotPlan(1, 9000, 2), NoiseModel(1.0, 0.0), lambda b: b == "1",
                    strict=False)
    p = 1 / 3
    assert abs(res.counts[0, -1] - 9000 * p) < 5 * math.sqrt(9000 * p * (1 - p))


def test_two_qubit_depolarized_bell_pair():
    # After a CNOT with p2 = 1 every non-identity Pauli is equally likely; on |00> the
    # outcome is 00 for the 3 Paulis in {I,Z}x{I,Z} minus identity, so P(00) = 3/15.
    res = run_noisy(Circuit(2, [cx(0, 1)]), ShotPlan(1, 15_000, 9), NoiseModel(0.0, 1.0), lambda b: b == "00")
    p = 3 / 15
    assert abs(res.counts[0, -1] - 15_000 * p) < 5 * math.sqrt(15_000 * p * (1 - p))


def test_strict_mode_rejects_untranspiled():
    with pytest.raises(ContractError):
        run_noisy(Circuit(2, [mcx([0], 1)]), ShotPlan(1, 1), NoiseModel(), lambda b: True)


def test_deterministic_and_worker_independent(cover, cover_solutions):
    circ, f = cover_circuit(cover, cover_solutions, "cardinality", 1, 5)
    plan = ShotPlan(3, 100, 4)
    noise = NoiseModel(1e-3, 1e-2)
    a = run_noisy(circ, plan, noise, f.mask, workers=1)
    b = run_noisy(circ, plan, noise, f.mask, workers=1)
    c = run_noisy(circ, plan, noise, f.mask, workers=2)
    assert np.array_equal(a.counts, b.counts) and np.array_equal(a.counts, c.counts)
    assert a.counts.shape == (3, 6)
    assert a.errored.sum() > 0


def test_boundaries_follow_query_count(cover, cover_solutions):
    circ, f = cover_circuit(cover, cover_solutions, "cardinality", 1, 5)
    res = run_noisy(circ, ShotPlan(2, 400, 1), NoiseModel(), f.mask)
    for k in range(6):
        p = success_probability(48, 1, k)
        assert abs(res.counts[:, k].mean() - 400 * p) < 5 * math.sqrt(400 * p * (1 - p) / 2) + 1e-9


def test_monotone_degradation(cover, cover_solutions):
    circ, f = cover_circuit(cover, cover_solutions, "cardinality", 1, 5)
    means = []
    for p2 in (0.0, 1e-5, 1e-4, 1e-3):
        res = run_noisy(circ, ShotPlan(20, 250, 0), NoiseModel(1e-5, p2), f.mask)
        means.append(res.final)
    for a, b in zip(means, means[1:]):
        assert welch_z(a, b) < 3  # b is not significantly above a
    assert welch_z(means[-1], means[0]) > 3


def test_count_csv(cover, cover_solutions):
    circ, f = cover_circuit(cover, cover_solutions, "cardinality", 1, 2)
    res = run_noisy(circ, ShotPlan(2, 10, 0), NoiseModel(), f.mask)
    rows = count_rows("triple", res, [2])
    text = write_counts_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(COUNT_HEADER) and len(lines) == 3
    assert lines[1].startswith("triple,2,0,") and lines[1].endswith(",noisy")
