"""Success probability versus query count for each initial state.

A smaller search space means a larger rotation angle per query, so the
peak arrives sooner.  Circuit-level simulation follows the closed form.
"""
import numpy as np

from cagrover.exact_cover import brute_force, make_strategy, reference_instance
from cagrover.grover import Mode, run

inst = reference_instance()
sols = brute_force(inst)
f = sols.predicate()

for spec, eta in [("uniform", 0), ("sets:4", 0), ("sets:1", 0), ("cardinality", 0), ("cardinality", 1)]:
    s = make_strategy(inst, spec, eta, sols)
    ideal = run(s, f, s.kappa_opt, Mode.IDEAL)
    exact = run(s, f, s.kappa_opt, Mode.CIRCUIT_EXACT)
    gap = np.max(np.abs(exact.trace - ideal.expected()))
    print(f"{s.name:16s} |F|={s.search_space:5d} kappa={s.kappa_opt:2d} "
          f"P={exact.success:.5f} max|circuit - closed form|={gap:.1e}")

# The uniform trace, coarsely
trace = run(make_strategy(inst, "uniform", 0, sols), f, 50).trace
for k in range(0, 51, 5):
    print(f"k={k:2d} " + "#" * int(60 * trace[k]))
