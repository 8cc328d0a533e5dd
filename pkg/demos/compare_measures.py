"""
Two entanglement measures on Werner states
==========================================

For pure states every reasonable measure agrees with the entropy of
entanglement.  For mixed states they part ways: on Werner states the
relative entropy of entanglement sits strictly below the entanglement of
formation once F passes one half.
"""

import numpy as np

from entangle import (
    entanglement_of_formation,
    entropy_of_entanglement,
    random_pure_state,
    relative_entropy_of_entanglement,
    werner_sweep,
)

rng = np.random.default_rng(1)
psi = random_pure_state(2, rng)
ere, _ = relative_entropy_of_entanglement(psi)
print("random pure state")
print("  entropy     ", entropy_of_entanglement(psi).value)
print("  formation   ", entanglement_of_formation(psi).value)
print("  relative    ", ere.value, "converged:", ere.diagnostics["converged"])

# the same sweep the CLI writes out with `entangle werner-sweep`
print()
print("   F      E_F       E_RE     PPT witness")
for r in werner_sweep(np.linspace(0.25, 1.0, 16)):
    print(f"{r.F:.3f}  {r.E_F:.6f}  {r.E_RE:.6f}  {r.ppt_witness:+.4f}")
