"""Depolarizing noise favours short circuits.

Each strategy is transpiled to {RZ, H, CNOT} and sampled under Pauli
noise at its own optimal query count.  A few runs are enough to see the
ordering; the acceptance suite uses 20 runs of 250 shots.
"""
from cagrover.exact_cover import brute_force, make_strategy, reference_instance
from cagrover.grover import Mode, run
from cagrover.noise import REFERENCE_NOISE, ShotPlan

inst = reference_instance()
f = brute_force(inst).predicate()
plan = ShotPlan(runs=5, shots_per_run=200, seed=0)

for spec, eta in [("uniform", 0), ("sets:1", 0), ("cardinality", 0), ("cardinality", 1)]:
    s = make_strategy(inst, spec, eta)
    ideal = run(s, f, s.kappa_opt).success
    noisy = run(s, f, s.kappa_opt, Mode.CIRCUIT_NOISY, plan, REFERENCE_NOISE).final
    print(f"{s.name:16s} kappa={s.kappa_opt:2d} ideal {ideal * plan.shots_per_run:6.1f}  "
          f"noisy {noisy.mean():6.1f} +- {noisy.std():4.1f}  (shots hit by an error: {noisy.errored.mean():.1f})")
