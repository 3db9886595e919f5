"""
Far-zone momentum distributions
===============================

Atoms detected in |2> carry the localization pattern into their momentum
distribution, the Fourier transform of the profile over the window.  A flat
profile gives the sinc^2 pattern of the window; sharper peaks push weight
to higher orders and suppress every other side lobe.
"""

# %%
import numpy as np

from cptloc import (alternate_suppression, default_p_grid, make_grid, momentum_distribution,
                    rho22_profile, second_moment, spectrum_peaks)

grid = make_grid(1, 720)
p = default_p_grid()              # p in units of hbar k, [-12, 12] step 0.05

spectra = {r: momentum_distribution(rho22_profile(r, grid), p) for r in (0, 4, 16, 100, 1600)}

# %% R = 0 is the bare window: (2 pi)^2 at p = 0, zeros at the other integers.
flat = spectra[0]
print(f"P(0) = {flat.value_at(0):.6f}  (4 pi^2 = {4 * np.pi ** 2:.6f})")
print("side lobes near p =", [round(q, 2) for q, _ in spectrum_peaks(flat) if 0 < q < 4])

# %% At R = 16 the central value is (2 pi / sqrt(17))^2.
print(f"R=16: P(0) = {spectra[16].value_at(0):.6f}  closed form {(2 * np.pi) ** 2 / 17:.6f}")

# %% The spread grows with R throughout.  Alternate side lobes fade at
# moderate R; once the peaks are much narrower than the wavelength the
# spectrum fills in towards a comb of even orders and the lobe ratio rises
# again.
for r, s in spectra.items():
    supp = alternate_suppression(s, flat) if r else 1.0
    print(f"R={r:>5}: alternate-lobe ratio {supp:.4f}   <p^2> {second_moment(s):8.4f}")

# %% The printed integrand uses rho22 itself; the amplitude picture uses its
# square root.  Both are available and tell the same qualitative story.
root = {r: momentum_distribution(rho22_profile(r, grid), p, "sqrt_mode") for r in (0, 16)}
print(f"sqrt_mode, R=16: alternate-lobe ratio {alternate_suppression(root[16], root[0]):.4f}")
