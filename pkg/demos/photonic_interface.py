"""A layered photonic medium, its half-period shift, and the mode they trap.

Writes ``impedance.csv`` and ``profile.csv`` to the current directory.
"""

import csv

import numpy as np

from bic1d import continuum, glued
from bic1d.fixtures import two_layer_medium

medium = two_layer_medium()
shifted = glued.dislocate(medium)
print("medium :", medium.pieces)
print("shifted:", shifted.pieces)

bands = continuum.band_structure(medium, 3)
for j in range(1, 4):
    if not bands.gap_open[j - 1]:
        print(f"gap {j}: closed at E = {bands.gaps[j - 1][0]:.6f}")
        continue
    lo, hi = bands.gap(j)
    a = continuum.bulk_index(medium, j).gamma
    b = continuum.bulk_index(shifted, j).gamma
    print(f"gap {j}: ({lo:.6f}, {hi:.6f}) at k* = {bands.gap_momentum(j):.4f}, "
          f"bulk index {a} / shifted {b}")

# In the first gap the two media disagree, so the impedances must cross once.
system = glued.glue(medium, shifted)
mode = glued.find_interface_mode(system)
print(f"\ninterface mode E* = {mode.energy:.12f}, residual {mode.residual:.1e}")
print(f"decay per period: left {mode.decay_left:.4f}, right {mode.decay_right:.4f}")

curve_l = continuum.impedance_curve(medium, system.gap, 200)
curve_r = continuum.impedance_curve(shifted, system.gap, 200)
with open("impedance.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["E", "xi_L", "xi_R"])
    w.writerows(zip(curve_l.energies, curve_l.xi_left, curve_r.xi_right))

p = mode.profile
with open("profile.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["x", "u", "v"])
    w.writerows(zip(p.x, p.u, p.v))

peak = p.x[np.argmax(np.abs(p.u))]
print(f"profile on [{p.x[0]:.0f}, {p.x[-1]:.0f}], peak |u| at x = {peak:.3f}; wrote impedance.csv, profile.csv")
