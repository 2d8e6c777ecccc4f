"""
Bipartite boundary sets
=======================

Build the 2(x+y)-4 state set living on the boundary of an x-by-y grid,
check that it is orthogonal, and ask whether either party can start a
nontrivial orthogonality-preserving measurement.
"""

import numpy as np

from genuine_nonlocality import bipartite_boundary_set, direct_sweep, fourier, hadamard, opm_space, random_ufl

# A 3x3 set with Hadamard unitaries on both parties.
s = bipartite_boundary_set(3, 3, hadamard(), hadamard())
print(f"{s.label}: {len(s)} states")
for i, state in enumerate(s):
    a, b = (np.round(f.real, 3) for f in state.factors)
    print(f"  state {i}: A={a} B={b}")

# Only the identity keeps all states orthogonal after a local measurement,
# so the solution space is one-dimensional on each side.
for side in ([0], [1]):
    rep = opm_space(s, side)
    print(f"party {side[0] + 1}: {rep.constraint_count} active pairs, solution_dim={rep.solution_dim}")

# The same holds for larger grids and for Fourier or random unitaries whose
# first and last rows have no zeros.
for x, y in [(4, 5), (5, 9)]:
    for name, X, Y in [("fourier", fourier(x - 1), fourier(y - 1)), ("random", random_ufl(x - 1, 1), random_ufl(y - 1, 2))]:
        cert = direct_sweep(bipartite_boundary_set(x, y, X, Y))
        print(f"({x},{y}) {name}: {cert.n_states} states -> {cert.verdict.value}")
