"""
Checking that local operations cannot create entanglement
=========================================================

Random local measurements, chained across both parties, are applied to
random states.  The expected entanglement afterwards should never exceed
what was there before, and separable states should stay separable.
"""

from entangle.locc import (
    audit_monotonicity,
    audit_separable_closure,
    check_teleport_accounting,
    random_protocol,
)

print("one random protocol:", random_protocol(5).description)

rep = audit_monotonicity("formation", trials=300, seed=0)
print("formation audit: worst margin", rep.worst_margin, "violations", len(rep.violations))

closure = audit_separable_closure(trials=100, seed=0)
print("separable closure:", closure.branches, "branches, lowest PPT witness", closure.min_witness)

# teleporting half of an entangled pair moves its entanglement across the cut
# and uses up the channel
for a2 in (0.5, 0.3, 0.1):
    r = check_teleport_accounting(a2)
    print(f"carrier a2={a2}: before {r.initial_cross_cut:.6f}, after {r.final_cross_cut:.6f}, "
          f"channel left {r.channel_after:.1e}")
