"""Four independent counts for a random block Jacobi operator.

The same eigenvalue count comes from the energy rotation of the end phase,
the Morse indices of the S-matrices, a unitary interpolation between sites,
and a space flow built from matrix logarithms of the transfer matrices.
"""
import json

import numpy as np

from pruefer import jacobi, oracle, translog
from pruefer.jacobi import BlockJacobiOperator

rng = np.random.default_rng(11)
H = BlockJacobiOperator.random(2, 6, rng)
ref = oracle.dense_jacobi_spectrum(H)
crit = translog.critical_energies(H)
print("eigenvalues:", np.round(ref.eigenvalues, 4))
print(f"logarithm branches: negative below {crit.E_c:.4f}, positive above {crit.E_c_prime:.4f}")

print("\nE        dense energy morse interp translog")
for E in np.linspace(ref.eigenvalues[0] - 0.5, ref.eigenvalues[-1] + 0.5, 8):
    try:
        t = translog.count_translog(H, E)
    except translog.Uncovered:
        t = "-"
    print(f"{E:7.3f} {oracle.count_below(ref, E):5d} {jacobi.count_by_energy_jacobi(H, E):6d}"
          f" {jacobi.morse_count(H, E):5d} {jacobi.interpolation_flow(H, E):6d} {t!s:>8}")

print("\nsite classification at the lowest sample energy:")
E = ref.eigenvalues[0] - 0.5
for rec in json.loads(translog.classification_records(H, E))[:3]:
    print(" ", rec["site"], rec["kinds"])

print("\nlocated eigenvalues:")
for e, m in jacobi.locate_eigenvalues_jacobi(H, (ref.eigenvalues[0] - 1, ref.eigenvalues[-1] + 1)):
    print(f"  {e: .10f} (dense {ref.eigenvalues[np.argmin(abs(ref.eigenvalues - e))]: .10f})")
