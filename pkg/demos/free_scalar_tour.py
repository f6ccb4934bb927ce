"""Counting the Dirichlet eigenvalues of -phi'' on [0, 1] three ways.

The eigenvalues are n^2 pi^2.  We count them by rotating the boundary
phase in energy, by following the phase along the interval, and by
diagonalizing a finite element matrix.
"""
import numpy as np

from pruefer import contsys, oracle

prob = contsys.free_scalar()
fem = oracle.fd_sl_spectrum(prob, 1000)

print("E       energy  space  fem")
for E in (5.0, 20.0, 50.0, 100.0):
    print(f"{E:6.1f}  {contsys.count_by_energy(prob, E):6d} {contsys.count_by_space(prob, E):6d}"
          f" {oracle.count_below(fem, E):4d}")

print("\nlocated eigenvalues in (5, 100]:")
for e, m in contsys.locate_eigenvalues(prob, (5.0, 100.0), tol_E=1e-10):
    n = round(np.sqrt(e) / np.pi)
    print(f"  {e:.10f}  multiplicity {m}  relative error vs n^2 pi^2: {abs(e / (n * np.pi) ** 2 - 1):.1e}")

# at E = 50 the phase passes -1 twice along the interval, always upward
rep, _ = contsys.space_flow(prob, 50.0)
print("\nconjugate points at E = 50:", [round(c.param, 4) for c in rep.crossings],
      "directions", [c.direction for c in rep.crossings])
print("expected at x = k pi / sqrt(50):", [round(float(k * np.pi / np.sqrt(50)), 4) for k in (1, 2)])
