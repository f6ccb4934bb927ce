"""A two-channel Sturm-Liouville problem with oscillating coefficients.

The left boundary mixes value and derivative through M = [[2, 1], [1, -3]]
and the right end is Dirichlet.  Phases along x need not be monotone here,
yet every passage through -1 is upward, so the space count is still the
eigenvalue count.
"""
import numpy as np

from pruefer import contsys, oracle

prob = contsys.two_channel_example()
fem = oracle.fd_sl_spectrum(prob, 2000)
print("lowest finite element eigenvalues:", np.round(fem.eigenvalues[:5], 5))

print("\nE       energy  space  fem")
for E in (-5.0, -3.5, 0.0, 2.0, 30.0):
    print(f"{E:6.1f}  {contsys.count_by_energy(prob, E):6d} {contsys.count_by_space(prob, E):6d}"
          f" {oracle.count_below(fem, E):4d}")

found = contsys.locate_eigenvalues(prob, (-8.0, 30.0))
print("\nphase-based eigenvalues in (-8, 30]:", [round(e, 6) for e, _ in found])

# far below the spectrum the phases start out decreasing at x = 0
print("initial phase slopes at E = -5:", np.round(contsys.initial_phase_slopes(prob, -5.0), 4))

# at low energy the phases wander back and forth along x, but every
# passage through -1 is upward
for E in (-3.5, 0.0, 30.0):
    path = contsys.pruefer_path(prob, E)
    back = np.mean(np.diff(path.tracks, axis=0) < 0)
    rep, _ = contsys.space_flow(prob, E)
    print(f"E = {E:5.1f}: tracks decrease on {back:4.0%} of the steps;"
          f" passages through -1: {[c.direction for c in rep.crossings]}")
