"""
Concentrating partly entangled pairs
====================================

Alice projects n copies of sqrt(a2)|00> + sqrt(1-a2)|11> onto subspaces
of fixed excitation count.  The expected number of Bell pairs per copy
creeps up to the entropy of entanglement, never above it.
"""

from entangle.concentration import asymptotic_rate, convergence_table, expected_entanglement

a2 = 0.3
print("entropy per pair:", asymptotic_rate(a2))

# two copies: only the one-excitation outcome yields anything, with weight 2 a2 (1-a2)
print("two copies      :", expected_entanglement(a2, 2))

for row in convergence_table(a2, [10, 100, 1000, 10_000, 100_000]):
    print(f"n={row.n:7d}  rate={row.rate:.9f}  ratio={row.ratio:.6f}")

# a lopsided state converges much more slowly
for row in convergence_table(0.999, [10, 1000, 100_000]):
    print(f"a2=0.999 n={row.n:7d}  ratio={row.ratio:.4f}")
