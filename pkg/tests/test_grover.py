import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cagrover.constraints import ReducedSet, SelectedSet, Selection, Strategy
from cagrover.exact_cover import make_strategy
from cagrover.exceptions import ContractError
from cagrover.grover import (GroverRun, Mode, OraclePredicate, apply_oracle, diffusion_circuit, grover_circuit,
                             run, search_space_mask, success_probability)
from cagrover.simulator import Circuit, StateVector, h, new_zero_state, run_circuit
from cagrover.stateprep import build_initializer, dicke1_circuit

from helpers import dense_unitary, equal_up_to_phase

REFERENCE_CARD = [("uniform", 0), ("sets:4", 0), ("sets:1", 0), ("cardinality", 0), ("cardinality", 1)]
REFERENCE_PARITY = ["sets:2", "parity"]


def uniform2():
    return run_circuit(Circuit(2, [h(0), h(1)]))


def test_oracle_examples():
    psi = uniform2()
    assert np.allclose(apply_oracle(psi, OraclePredicate(2, lambda b: False)).amplitudes, psi.amplitudes)
    flipped = apply_oracle(psi, OraclePredicate(2, lambda b: True))
    assert np.allclose(flipped.amplitudes, -psi.amplitudes)
    out = apply_oracle(psi, OraclePredicate.from_solutions(2, ["11"]))
    assert np.allclose(out.amplitudes, [0.5, 0.5, 0.5, -0.5])


def test_oracle_arity():
    with pytest.raises(ContractError):
        apply_oracle(new_zero_state(2), OraclePredicate(3, lambda b: True))
    with pytest.raises(ContractError):
        OraclePredicate.from_solutions(2, ["101"])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_oracle_involution_and_norm(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    psi = StateVector(n, v / np.linalg.norm(v))
    sols = [format(i, f"0{n}b") for i in np.flatnonzero(rng.random(2 ** n) < 0.3)]
    f = OraclePredicate.from_solutions(n, sols)
    once = apply_oracle(psi, f)
    assert abs(once.norm() - 1) < 1e-12
    assert np.allclose(apply_oracle(once, f).amplitudes, psi.amplitudes)


@pytest.mark.parametrize("init", [Circuit(3, [h(0), h(1), h(2)]), dicke1_circuit(3)])
def test_diffusion_is_reflection_about_initial_state(init):
    psi = dense_unitary(init)[:, 0]
    ref = 2 * np.outer(psi, psi.conj()) - np.eye(8)
    assert equal_up_to_phase(dense_unitary(diffusion_circuit(init, 3)), ref, tol=1e-9)


def test_diffusion_width_mismatch():
    with pytest.raises(ContractError):
        diffusion_circuit(Circuit(2, [h(0)]), 3)


def test_success_probability_examples():
    assert success_probability(96, 1, 7) == pytest.approx(0.99862, abs=1e-5)
    assert success_probability(48, 1, 5) == pytest.approx(0.99949, abs=1e-5)
    assert success_probability(10, 10, 0) == pytest.approx(1.0)
    assert success_probability(4, 1, 1) == pytest.approx(1.0, abs=1e-15)


def test_quarter_space_run():
    strat = Strategy(Selection(), 2, 1)
    f = OraclePredicate.from_solutions(2, ["10"])
    for mode in (Mode.IDEAL, Mode.CIRCUIT_EXACT):
        r = run(strat, f, 1, mode)
        assert r.trace[0] == pytest.approx(0.25) and r.success == pytest.approx(1.0, abs=1e-12)


def test_uniform_reference_run(cover, cover_solutions):
    s = make_strategy(cover, "uniform")
    r = run(s, cover_solutions.predicate(), 25)
    assert len(r.trace) == 26 and r.kappa == 25
    theta = math.asin(1 / 32)
    assert r.success == pytest.approx(math.sin(51 * theta) ** 2, abs=1e-9)
    assert r.success == pytest.approx(0.99946, abs=1e-5)
    assert r.trace[0] == pytest.approx(1 / 1024)


def test_solutions_outside_space_rejected():
    sel = Selection((SelectedSet((1, 2), 1, "dicke"),))
    strat = Strategy(sel, 3)
    with pytest.raises(ContractError):
        run(strat, OraclePredicate.from_solutions(3, ["110"]), 1)
    with pytest.raises(ContractError):
        run(strat, OraclePredicate.from_solutions(3, ["100"]), -1)


@pytest.mark.parametrize("spec,eta", REFERENCE_CARD)
def test_modes_agree_and_peak_on_reference_strategies(cover, cover_solutions, spec, eta):
    s = make_strategy(cover, spec, eta)
    f = cover_solutions.predicate()
    k = s.kappa_opt
    ideal = run(s, f, 2 * k, Mode.IDEAL)
    exact = run(s, f, k, Mode.CIRCUIT_EXACT)
    assert np.max(np.abs(ideal.trace[:k + 1] - exact.trace)) < 1e-7
    assert np.max(np.abs(ideal.trace - ideal.expected())) < 1e-9
    assert abs(int(np.argmax(ideal.trace)) - k) <= 1


@pytest.mark.parametrize("spec", REFERENCE_PARITY)
def test_parity_strategies(weighted, weighted_solutions, spec):
    s = make_strategy(weighted, spec)
    r = run(s, weighted_solutions.predicate(), s.kappa_opt, Mode.CIRCUIT_EXACT)
    assert np.max(np.abs(r.trace - r.expected())) < 1e-7


def random_strategy(rng, n):
    blocks, free = [], list(range(1, n + 1))
    rng.shuffle(free)
    reduced = []
    while len(free) >= 2 and rng.random() < 0.7:
        mu = int(rng.integers(2, min(4, len(free)) + 1))
        members, free = tuple(sorted(free[:mu])), free[mu:]
        choice = rng.random()
        if choice < 0.4:
            blocks.append(SelectedSet(members, 1, "dicke"))
        elif choice < 0.8:
            blocks.append(SelectedSet(members, int(rng.integers(0, 2)), "ghz"))
        else:
            reduced.append(ReducedSet(members, 1, 1))
    return Strategy(Selection(tuple(blocks), tuple(reduced), 1), n)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
def test_closed_form_law_on_random_instances(n, seed):
    rng = np.random.default_rng(seed)
    strat = random_strategy(rng, n)
    inside = np.flatnonzero(search_space_mask(strat.selection, n))
    count = int(rng.integers(1, max(2, len(inside) // 3) + 1))
    sols = [format(int(i), f"0{n}b") for i in rng.choice(inside, size=min(count, len(inside)), replace=False)]
    f = OraclePredicate.from_solutions(n, sols)
    kappa = 30 if n <= 6 else 12
    ideal = run(strat, f, kappa, Mode.IDEAL)
    assert np.max(np.abs(ideal.trace - ideal.expected())) < 1e-7
    exact = run(strat, f, min(kappa, 8), Mode.CIRCUIT_EXACT)
    assert np.max(np.abs(exact.trace - exact.expected())) < 1e-7


def test_grover_circuit_matches_stepwise_run(cover, cover_solutions):
    s = make_strategy(cover, "cardinality", 1)
    f = cover_solutions.predicate()
    init, _ = build_initializer(s)
    state = run_circuit(grover_circuit(init, f, 3))
    assert float(state.probabilities()[f.mask].sum()) == pytest.approx(run(s, f, 3).success, abs=1e-10)


def test_noisy_mode_shape(cover, cover_solutions):
    from cagrover.noise import NoiseModel, ShotPlan
    s = make_strategy(cover, "cardinality", 1)
    r = run(s, cover_solutions.predicate(), 2, Mode.CIRCUIT_NOISY, ShotPlan(2, 50, 0), NoiseModel())
    assert isinstance(r, GroverRun) and r.trace.shape == (3,)
    assert r.final.counts.shape == (2, 3)
