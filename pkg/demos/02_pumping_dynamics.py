"""
Optical pumping into the dark state
===================================

The closed-form profile assumes the atom has relaxed into the dark state.
Here the master equation is integrated at a few positions to watch that
happen, for flat-top and Gaussian beam envelopes.  The atom starts in |3>.
"""

# %%
import numpy as np

from cptloc import (DensityMatrix3, EvolutionConfig, LambdaSystem, dark_state, dark_state_fidelity,
                    evolve, matched_envelopes, rho22_at, steady_state_reached)
from cptloc.dynamics import relaxation_rate

R = 16
system = LambdaSystem.from_ratio(R)     # Op = 1, Os = 4, gamma = 5, no detuning
start = DensityMatrix3.basis(3)

# %% Flat-top beams: a quick rise, then a long plateau.
probe, control = matched_envelopes(system, "flattop", t1=2.0, r1=0.4, t2=500.0, r2=0.4)
config = EvolutionConfig.default_for(system, (probe, control), t_end=200.0)
print(f"step {config.dt} (stability bound), {config.n_steps} steps")

for kx in (0.0, np.pi / 8, np.pi / 4, np.pi / 2):
    traj = evolve(system, (probe, control), kx, start, config)
    dark = dark_state(1.0, np.sqrt(R) * np.sin(kx))
    print(f"kx={kx:.4f}: rho22 {traj.final.populations[1]:.6f} "
          f"(closed form {rho22_at(R, kx):.6f}), fidelity {dark_state_fidelity(traj.final, dark):.6f}, "
          f"steady {steady_state_reached(traj, config)}")

# %% A snapshot of the approach at kx = pi/4: |3> drains, |1> barely fills.
traj = evolve(system, (probe, control), np.pi / 4, start, config)
for i in np.searchsorted(traj.times, [0.0, 2.0, 3.0, 4.0, 6.0, 10.0]):
    p1, p2, p3 = traj.rho[i].diagonal().real
    print(f"t={traj.times[i]:7.2f}  rho11 {p1:.5f}  rho22 {p2:.5f}  rho33 {p3:.5f}")

# %% Gaussian beams reach the same state; the envelope shape does not matter
# as long as the pulse lasts many relaxation times.  A large detuning slows
# pumping but leaves the end point alone.
for delta in (0.0, 20.0):
    sys_d = LambdaSystem.from_ratio(R, delta=delta)
    t_end = max(50.0, 40.0 / relaxation_rate(sys_d, np.pi / 4))
    env = matched_envelopes(sys_d, "gaussian", t0=t_end / 2, w=t_end / 4)
    traj = evolve(sys_d, env, np.pi / 4, start, EvolutionConfig.default_for(sys_d, env, t_end))
    print(f"gaussian, delta={delta:>4}: t_end {t_end:7.1f}, rho22 {traj.final.populations[1]:.6f}")
