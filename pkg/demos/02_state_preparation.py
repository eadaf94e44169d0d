"""Block circuits for the initial state and what they cost.

A weight-one Dicke block spreads one excitation over mu qubits with a
cascade of controlled-RY gates; a parity block is a GHZ state seen in the
X basis.  The printed amplitudes show each state is uniform on its support.
"""
import numpy as np

from cagrover.resources import tally
from cagrover.simulator import bitstring, run_circuit
from cagrover.stateprep import dicke1_circuit, dicke11_circuit, ghz_x_circuit


def show(name, circ):
    amps = run_circuit(circ).amplitudes.real
    support = np.flatnonzero(np.abs(amps) > 1e-12)
    print(f"{name}: tally {tally(circ).as_tuple()}")
    print("   ", ", ".join(f"{bitstring(i, circ.width)}:{amps[i]:+.4f}" for i in support))


show("Dicke mu=3 weight 1", dicke1_circuit(3))
show("Dicke mu=3 weight 0 or 1", dicke11_circuit(3))
show("GHZ-X mu=4 even parity", ghz_x_circuit(4, 0))
show("GHZ-X mu=4 odd parity", ghz_x_circuit(4, 1))

# Gate counts grow linearly with the block size.
print("\n mu  dicke1        ghz_x(odd)")
for mu in range(2, 9):
    print(f"{mu:3d}  {str(tally(dicke1_circuit(mu)).as_tuple()):12s}  {tally(ghz_x_circuit(mu, 1)).as_tuple()}")
