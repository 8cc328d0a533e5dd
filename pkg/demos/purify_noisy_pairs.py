"""
Purifying noisy pairs
=====================

Two copies of a Bell-diagonal pair go in, at most one comes out.  Each
round raises the weight on Phi+ when it starts above one half, at the
price of throwing away at least half of the pairs.
"""

from entangle import BellCoefficients, iterate, qpa_gate_kept, qpa_map, werner
from entangle.purification import to_phi_plus_frame

c = BellCoefficients(0.55, 0.15, 0.15, 0.15)
trace = iterate(c, target_A=1 - 1e-6)

print(" round        A            N       surviving")
for k, a, b, cc, d, n, frac in trace.rows():
    print(f"{k:6d}  {a:.10f}  {n:.6f}  {frac:.3e}")
print("converged:", trace.converged, "after", trace.n_rounds, "rounds")

# the recurrence is a shortcut: simulating the two-pair circuit gives the same pair
c = BellCoefficients(0.75, 1 / 12, 1 / 12, 1 / 12)
kept, n_gate = qpa_gate_kept(c.density(), c.density())
ref, n_map = qpa_map(c)
print()
print("success probability, circuit vs map:", n_gate, n_map)

# Werner pairs sit on the singlet; rotate them into the Phi+ frame first
rho = to_phi_plus_frame(werner(0.7), "psi-")
print("Werner 0.7 needs", iterate(rho).n_rounds, "rounds")

# below one half nothing improves
stuck = iterate(BellCoefficients(0.4, 0.2, 0.2, 0.2), target_A=0.9)
print("starting at A = 0.4:", stuck.converged, stuck.final.as_array().round(6))
