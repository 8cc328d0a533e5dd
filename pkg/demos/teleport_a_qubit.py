"""
Teleporting one qubit
=====================

Alice holds an unknown qubit and half of a Bell pair; Bob holds the other
half.  A Bell measurement on Alice's side plus a Pauli correction on Bob's
side moves the state across.  Swap the Bell pair for a product state and
the trick stops working.
"""

import numpy as np

from entangle import PHI_PLUS, PureState, average_fidelity, ket, teleport

# an arbitrary input, sqrt(0.3)|0> + sqrt(0.7)|1>
psi = PureState([np.sqrt(0.3), np.sqrt(0.7)])

# with a Bell channel every outcome is equally likely and every
# outcome is corrected back to the input
for o in teleport(psi, PHI_PLUS):
    print(f"{o.bell_result:5s} p={o.probability:.3f} fidelity={o.fidelity_to_input:.12f}")

# with |00> as the channel Bob's qubit never learns anything about psi
print()
for o in teleport(psi, ket("00")):
    print(f"{o.bell_result:5s} p={o.probability:.3f} fidelity={o.fidelity_to_input:.3f}")

# averaged over the six axis states: 1 for a Bell pair, 2/3 for a product pair
print()
print("average fidelity, Bell channel   :", round(average_fidelity(PHI_PLUS), 12))
print("average fidelity, product channel:", round(average_fidelity(ket("00")), 12))
