"""Greedy preprocessing on the ten-subset exact-cover instance.

Every universe element gives one constraint "exactly one chosen subset
covers me".  The greedy pass keeps the most restrictive constraints that
do not share variables, and each kept block shrinks the search space.
"""
from cagrover.exact_cover import (brute_force, constraints_of, describe_selection, make_strategy,
                                  reference_instance, weighted_reference_instance)

inst = reference_instance()
for j, c in enumerate(constraints_of(inst), 1):
    print(f"C{j} = {sorted(c.members)}  sum = {c.target}")

sols = brute_force(inst)
print("solutions:", sols.selected())

# Without overlap only C1 and C4 survive; allowing one shared variable
# also keeps what remains of C7.
for eta in (0, 1):
    s = make_strategy(inst, "cardinality", eta, sols)
    print(f"\neta = {eta}")
    for line in describe_selection(s.selection):
        print("  " + line)
    print(f"  |F| = {s.search_space} of {2 ** inst.n}, kappa_opt = {s.kappa_opt}")

# Weighted variant: weights 2 on A3, A6, A10 and double coverage.  Only the
# parity of each constraint survives, and two parity blocks are disjoint.
w = weighted_reference_instance()
s = make_strategy(w, "parity")
print("\nweighted variant, solution", brute_force(w).selected())
for line in describe_selection(s.selection):
    print("  " + line)
print(f"  |F| = {s.search_space}, kappa_opt = {s.kappa_opt}")
