"""SSH chain: bulk winding, a boundary zero mode, and zero modes at interfaces.

Run with ``python demos/ssh_edge_states.py``.
"""

import numpy as np

from bic1d import lattice, lattice_interface
from bic1d.fixtures import ssh_model
from bic1d.lattice import SIGMA3

# Two dimerizations of the same chain. The intracell hopping s sits on the
# onsite block, the intercell hopping t on A_1.
trivial = ssh_model(1.0, 0.5)
topological = ssh_model(0.5, 1.0)

for name, m in (("trivial", trivial), ("topological", topological)):
    bands, gap = lattice.band_spectrum(m)
    print(f"{name:12s} gap ({gap.lower:+.3f}, {gap.upper:+.3f})  winding {lattice.winding_number(m):+d}"
          f"  zak {'pi' if lattice.zak_phase(m) else '0'}")

# The chiral index of a truncated half-line counts kernel vectors of each
# sublattice after discarding anything that lives at the far, artificial cut.
for name, m in (("trivial", trivial), ("topological", topological)):
    trunc = lattice_interface.build_half_space(m, "right", 100)
    print(f"right half-line, {name}: index {lattice_interface.chiral_index(trunc, SIGMA3)}")

# The surviving zero mode decays like (s/t)^n away from the edge.
trunc = lattice_interface.build_half_space(topological, "right", 100)
(mode,) = lattice_interface.in_gap_modes(trunc, lattice.band_spectrum(topological)[1])
print(f"edge mode: E = {mode.energy:.2e}, decay length {mode.decay_length:.4f} cells"
      f" (1/ln 2 = {1 / np.log(2):.4f})")

# Cutting a chain and reconnecting it with arbitrary couplings leaves one
# extra site in the middle. Chiral symmetry pins an odd number of zero modes
# there, whatever the couplings are.
for u_left, u_right in ((0.3, 0.7), (2.0, -1.3), (0.05, 1.7)):
    res = lattice_interface.verify_ssh(1.0, 0.5, u_left, u_right)
    centers = [m.center for m in res.modes]
    print(f"couplings ({u_left:+.2f}, {u_right:+.2f}): {res.count} zero mode(s), centred at cells {centers}")
