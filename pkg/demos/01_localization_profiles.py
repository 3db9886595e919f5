"""
Localization profiles and the Fabry-Perot analogy
==================================================

An atom crossing a weak probe and a standing-wave control field is pumped
into the dark state.  The chance of finding it in |2> is

    rho22(x) = 1 / (1 + R sin^2 kx),     R = |Os|^2 / |Op|^2,

which is the Airy transmission of a Fabry-Perot cavity with R playing the
role of the coefficient of finesse.
"""

# %%
import numpy as np

from cptloc import fabry_perot_reference, fwhm_formula, fwhm_numeric, make_grid, rho22_profile

grid = make_grid(1, 720)          # one wavelength, kx in [-pi, pi]
kx = grid.kx_values

# %% Peaks sit at the nodes (kx = 0, +-pi) and the floor is 1/(1+R).
for r in (0.5, 1, 2, 4, 16, 100, 1600):
    v = rho22_profile(r, grid).values
    print(f"R={r:>6}: max {v.max():.3f} at kx/pi = {kx[np.argmax(v)] / np.pi:+.2f}, "
          f"min {v.min():.6f} (1/(1+R) = {1 / (1 + r):.6f})")

# %% Peaks appear once R exceeds 1: below that the floor never drops to 1/2.
# The width follows k dx = 2/sqrt(R) at high finesse; the exact width is
# 2 arcsin(1/sqrt(R)), slightly larger.
for r in (16, 100, 400, 1600):
    w = fwhm_numeric(rho22_profile(r, grid))
    print(f"R={r:>5}: fwhm {w:.7f}   2/sqrt(R) {fwhm_formula(r):.7f}   ratio {w / fwhm_formula(r):.5f}")

# %% The cavity picture is the same function, sample for sample.
same = np.array_equal(fabry_perot_reference(16, grid).values, rho22_profile(16, grid).values)
print("Airy function with coefficient of finesse 16 matches R=16:", same)
