"""Is a richer initial state worth it?

Total cost is one preparation plus, per query, the oracle O, the
reflection core D and the preparation twice.  Fewer queries pay for a
costlier preparation once O + D is large enough.
"""
from cagrover.exact_cover import make_strategy, reference_instance
from cagrover.resources import (P1_THRESHOLD, diffusion_core_circuit, efficiency_bound, mcx_cost,
                                prop1_simplified, prop3_simplified, tally, total_cost)
from cagrover.stateprep import build_initializer

inst = reference_instance()
core = tally(diffusion_core_circuit(inst.n), decompose=True)
print("reflection core on 10 qubits (gates, 2q gates, depth):", core.as_tuple())
print("9-control X alone:", mcx_cost(9).as_tuple(), "threshold", P1_THRESHOLD)

base = make_strategy(inst, "uniform")
s0 = tally(build_initializer(base)[0]).total_gates
for spec, eta in [("uniform", 0), ("cardinality", 0), ("cardinality", 1)]:
    s = make_strategy(inst, spec, eta)
    prep = tally(build_initializer(s)[0]).total_gates
    for oracle_cost in (0, 200):
        r = total_cost(prep, oracle_cost, core.total_gates, s.kappa_opt)
        print(f"{s.name:16s} S={prep:3d} kappa={s.kappa_opt:2d} O={oracle_cost:3d}  R={r:8.0f}")
    if s.kappa_opt < base.kappa_opt:
        print(f"    break-even O+D vs uniform: {efficiency_bound(prep, s0, s.kappa_opt, base.kappa_opt):.2f}")

print("\nsufficient O+D for adding a weight-one block of size mu:")
for mu in range(2, 9):
    print(f"  mu={mu}: {prop1_simplified(mu):7.2f}   (parity block: {prop3_simplified(mu):7.2f})")
