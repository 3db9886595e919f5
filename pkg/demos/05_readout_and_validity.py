"""
rf readout and the Raman-Nath check
===================================

A pi/2 rf pulse between |2> and |3> turns the ground-state coherence into
a population, which tells the two sides of a node apart.  The whole model
also assumes the atom does not move during the interaction; that holds
while the recoil energy of the highest momentum order stays well below the
Rabi frequencies.
"""

# %%
import numpy as np

from cptloc import PhysicalScales, make_grid, rf_readout_profile, rna_valid

grid = make_grid(1, 720)
kx = grid.kx_values
v = rf_readout_profile(1.0, 1.0, grid).values

# %% 1/2 at every node, 1 and 0 at the antinodes of opposite sign.
print("at nodes:", v[np.isin(kx, [-np.pi, 0.0, np.pi])])
print(f"max {v.max():.3f} at kx/pi = {kx[np.argmax(v)] / np.pi:+.2f}, "
      f"min {v.min():.3f} at kx/pi = {kx[np.argmin(v)] / np.pi:+.2f}")
print(f"period mean {v[:-1].mean():.12f}")

# %% Recoil in the kHz range against Rabi frequencies of tens of MHz leaves
# orders up to p = 10 comfortably inside the approximation; a 100 kHz
# coupling would not.
recoil = 2 * np.pi * 0.004        # 4 kHz, in the same units as the reference
for reference, label in ((2 * np.pi * 10.0, "10 MHz"), (2 * np.pi * 0.1, "100 kHz")):
    ok = rna_valid(10, PhysicalScales(recoil, reference), omega_p=1.0, omega_s_peak=4.0)
    print(f"Rabi reference {label:>7}: valid up to p=10 -> {ok}")
