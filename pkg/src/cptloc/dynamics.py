"""
Time-dependent master-equation integration of the driven Lambda atom.

The atom crosses the probe and the standing wave, so it sees Rabi
frequencies that rise and fall in time. ``evolve`` integrates

    drho/dt = -i[H(t), rho] + g2 D[|2><1|] rho + g3 D[|3><1|] rho

with a fixed-step classical RK4 scheme in the frame rotating at the laser
frequencies, where the one-photon detuning sits on the ``|1>`` diagonal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ._kernels import rk4_chunk
from .core import (
    DensityMatrix3,
    LambdaSystem,
    PhysicalScales,
    StateVector3,
    check_density_matrices,
    node_sin,
)
from .errors import InvalidArgumentError, NumericalInstabilityError

__all__ = [
    "PulseEnvelope",
    "EvolutionConfig",
    "Trajectory",
    "gaussian_envelope",
    "flattop_envelope",
    "hamiltonian_matrix",
    "matched_envelopes",
    "stability_dt",
    "evolve",
    "steady_state_reached",
    "dark_state_fidelity",
    "rna_valid",
    "liouvillian",
    "relaxation_rate",
]

logger = logging.getLogger(__name__)

STABILITY_FACTOR = 0.01
INSTABILITY_TOL = 1e-6
_CHUNK_STEPS = 200_000


@dataclass(frozen=True)
class PulseEnvelope:
    """Time profile of one beam as seen by the moving atom.

    Use :meth:`gaussian` or :meth:`flattop` rather than the raw constructor.
    ``omega0`` is the peak Rabi frequency (a magnitude; the phase comes from
    the :class:`LambdaSystem`).
    """

    shape: str
    omega0: float
    t0: float = 0.0
    w: float = 1.0
    t1: float = 0.0
    r1: float = 1.0
    t2: float = 1.0
    r2: float = 1.0

    def __post_init__(self):
        if self.shape not in ("gaussian", "flattop"):
            raise InvalidArgumentError(f"unknown envelope shape {self.shape!r}")
        params = (self.omega0, self.t0, self.w, self.t1, self.r1, self.t2, self.r2)
        if not all(np.isfinite(params)):
            raise InvalidArgumentError("envelope parameters must be finite")
        if self.omega0 < 0:
            raise InvalidArgumentError("omega0 must be non-negative")
        if self.shape == "gaussian" and not self.w > 0:
            raise InvalidArgumentError("gaussian width w must be positive")
        if self.shape == "flattop":
            if not (self.r1 > 0 and self.r2 > 0):
                raise InvalidArgumentError("flat-top rise and fall times must be positive")
            if not self.t2 > self.t1:
                raise InvalidArgumentError("flat-top needs t2 > t1")

    @classmethod
    def gaussian(cls, omega0: float, t0: float, w: float) -> "PulseEnvelope":
        return cls("gaussian", float(omega0), t0=float(t0), w=float(w))

    @classmethod
    def flattop(cls, omega0: float, t1: float, r1: float, t2: float, r2: float) -> "PulseEnvelope":
        return cls("flattop", float(omega0), t1=float(t1), r1=float(r1), t2=float(t2), r2=float(r2))

    def __call__(self, t):
        if self.shape == "gaussian":
            return gaussian_envelope(t, self)
        return flattop_envelope(t, self)

    @property
    def peak(self) -> float:
        return self.omega0


def gaussian_envelope(t, env: PulseEnvelope):
    """``omega0 * exp(-((t - t0)/w)^2)``."""
    if env.shape != "gaussian":
        raise InvalidArgumentError("gaussian_envelope needs a gaussian envelope")
    return env.omega0 * np.exp(-(((np.asarray(t, dtype=float) - env.t0) / env.w) ** 2))


def flattop_envelope(t, env: PulseEnvelope):
    """``omega0/2 * [tanh((t - t1)/r1) - tanh((t - t2)/r2)]``, clipped at 0.

    With ``r2 > r1`` the bare expression dips slightly below zero before the
    rise; a Rabi magnitude cannot be negative, so those values are clipped.
    """
    if env.shape != "flattop":
        raise InvalidArgumentError("flattop_envelope needs a flattop envelope")
    t = np.asarray(t, dtype=float)
    value = 0.5 * env.omega0 * (np.tanh((t - env.t1) / env.r1) - np.tanh((t - env.t2) / env.r2))
    return np.maximum(value, 0.0)


def matched_envelopes(system: LambdaSystem, shape: str, **timing) -> Tuple[PulseEnvelope, PulseEnvelope]:
    """Probe and control envelopes of the same shape with the system's peak magnitudes.

    Identical time dependence keeps the ratio ``Os/Op`` (and hence the dark
    state) fixed while the beams ramp.
    """
    make = PulseEnvelope.gaussian if shape == "gaussian" else PulseEnvelope.flattop
    if shape not in ("gaussian", "flattop"):
        raise InvalidArgumentError(f"unknown envelope shape {shape!r}")
    return make(abs(system.omega_p), **timing), make(abs(system.omega_s_peak), **timing)


def hamiltonian_matrix(omega_p_t: complex, omega_s_xt: complex, delta: float) -> np.ndarray:
    """Rotating-frame Hamiltonian (hbar = 1) in the ``(|1>, |2>, |3>)`` basis.

    The excited state carries ``-delta``; the couplings are
    ``<1|H|2> = -Os`` and ``<1|H|3> = -Op`` so that
    ``(Op|2> - Os|3>)/Omega`` is annihilated for any complex amplitudes.
    """
    h = np.zeros((3, 3), dtype=complex)
    h[0, 0] = -delta
    h[0, 1] = -omega_s_xt
    h[0, 2] = -omega_p_t
    h[1, 0] = -np.conj(omega_s_xt)
    h[2, 0] = -np.conj(omega_p_t)
    return h


def stability_dt(peaks, delta: float, gamma: float) -> float:
    """Largest step allowed by ``dt <= 0.01 / max(peaks, |delta|, gamma, 1)``."""
    scale = max(max(abs(p) for p in peaks), abs(delta), gamma, 1.0)
    return STABILITY_FACTOR / scale


@dataclass(frozen=True)
class EvolutionConfig:
    """Integrator settings.

    ``save_every`` thins the stored trajectory; ``None`` keeps at most
    about 4000 states.
    """

    dt: float
    t_end: float
    steady_tolerance: float = 1e-5
    steady_window: Optional[float] = None
    save_every: Optional[int] = None

    def __post_init__(self):
        if not (self.dt > 0 and self.t_end > 0):
            raise InvalidArgumentError("dt and t_end must be positive")
        if not self.steady_tolerance > 0:
            raise InvalidArgumentError("steady_tolerance must be positive")
        if self.steady_window is None:
            object.__setattr__(self, "steady_window", self.t_end / 10.0)
        if not self.steady_window > 0:
            raise InvalidArgumentError("steady_window must be positive")
        if self.t_end < 10.0 * self.steady_window * (1 - 1e-12):
            raise InvalidArgumentError("t_end must be at least 10 steady windows")
        if self.save_every is not None and (int(self.save_every) != self.save_every
                                            or self.save_every < 1):
            raise InvalidArgumentError("save_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(np.ceil(self.t_end / self.dt - 1e-9))

    @property
    def stride(self) -> int:
        if self.save_every is not None:
            return int(self.save_every)
        return max(1, int(np.ceil(self.n_steps / 4000)))

    @classmethod
    def default_for(cls, system: LambdaSystem, envelopes, t_end: float, **kwargs) -> "EvolutionConfig":
        """Config using the largest stable step for this system and these envelopes."""
        dt = stability_dt([e.peak for e in envelopes], system.delta, system.decay.gamma_total)
        return cls(dt=dt, t_end=t_end, **kwargs)


@dataclass(frozen=True)
class Trajectory:
    """Stored states of an integration, ``rho[i]`` at ``times[i]``."""

    times: np.ndarray
    rho: np.ndarray

    @property
    def states(self):
        return [DensityMatrix3._trusted(r) for r in self.rho]

    @property
    def final(self) -> DensityMatrix3:
        return DensityMatrix3._trusted(self.rho[-1])

    def population(self, level: int) -> np.ndarray:
        return self.rho[:, level - 1, level - 1].real

    def coherence(self, i: int, j: int) -> np.ndarray:
        return self.rho[:, i - 1, j - 1]


def evolve(system: LambdaSystem, envelopes: Tuple[PulseEnvelope, PulseEnvelope], kx: float,
           initial: DensityMatrix3, config: EvolutionConfig) -> Trajectory:
    """Integrate the master equation at fixed position ``kx``.

    ``envelopes`` is ``(probe, control)``. The probe Rabi frequency is
    ``probe(t)`` times the phase of ``system.omega_p``; the local control
    Rabi frequency is ``control(t) * sin(kx)`` times the phase of
    ``system.omega_s_peak``.

    Raises
    ------
    InvalidArgumentError
        If ``config.dt`` violates the stability bound.
    NumericalInstabilityError
        If a state drifts out of the physical set; the message names the time.
    """
    probe, control = envelopes
    gamma = system.decay.gamma_total
    limit = stability_dt([probe.peak, control.peak], system.delta, gamma)
    if config.dt > limit * (1 + 1e-12):
        raise InvalidArgumentError(f"dt={config.dt} exceeds stability bound {limit}")

    phase_p = system.omega_p / abs(system.omega_p)
    phase_s = system.omega_s_peak / abs(system.omega_s_peak) if system.omega_s_peak != 0 else 1.0
    cp = complex(phase_p)
    cs = complex(phase_s * node_sin(kx))

    dt = float(config.dt)
    n_steps, stride = config.n_steps, config.stride
    n_store = n_steps // stride + 1
    times = np.empty(n_store)
    saved = np.empty((n_store, 3, 3), dtype=complex)
    rho = np.array(initial.elements, dtype=complex)
    times[0], saved[0] = 0.0, rho
    stored = 1

    done = 0
    while done < n_steps:
        m = min(_CHUNK_STEPS, n_steps - done)
        t_half = (done + 0.5 * np.arange(2 * m + 1)) * dt
        env_p = np.ascontiguousarray(probe(t_half), dtype=float)
        env_s = np.ascontiguousarray(control(t_half), dtype=float)
        n_saved, failed = rk4_chunk(rho, env_p, env_s, cp, cs, float(system.delta),
                                    system.decay.gamma_to_2, system.decay.gamma_to_3,
                                    dt, m, stride, done, saved[stored:], INSTABILITY_TOL)
        if failed >= 0:
            t_fail = (done + failed + 1) * dt
            raise NumericalInstabilityError(f"trace drift beyond {INSTABILITY_TOL} at t={t_fail:.6g}",
                                            time=t_fail)
        first = (done // stride + 1) * stride
        times[stored:stored + n_saved] = first * dt + stride * dt * np.arange(n_saved)
        stored += n_saved
        done += m

    times, saved = times[:stored], saved[:stored]
    _validate_stored(times, saved)
    logger.debug("evolve: %d steps, %d stored states", n_steps, stored)
    return Trajectory(times, saved)


def _validate_stored(times, rho):
    herm = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    eig_min = np.linalg.eigvalsh(herm).min(axis=-1)
    bad = np.flatnonzero(eig_min < -INSTABILITY_TOL)
    if bad.size:
        t = float(times[bad[0]])
        raise NumericalInstabilityError(f"negative eigenvalue {eig_min[bad[0]]:.3g} at t={t:.6g}", time=t)
    # RK4 is not positivity preserving; zero eigenvalues of (nearly) pure
    # states drift by O(dt^4) and are tolerated up to the instability bound.
    ok = check_density_matrices(rho, trace_tol=INSTABILITY_TOL, positivity_tol=INSTABILITY_TOL)
    if not ok.all():
        t = float(times[np.flatnonzero(~ok)[0]])
        raise NumericalInstabilityError(f"stored state is not a valid density matrix at t={t:.6g}", time=t)


def steady_state_reached(traj: Trajectory, config: EvolutionConfig) -> bool:
    """True if no element of rho moved by ``steady_tolerance`` or more over the last window."""
    window = config.steady_window
    span = traj.times[-1] - traj.times[0]
    if span < 2 * window * (1 - 1e-12):
        raise InvalidArgumentError("trajectory shorter than two steady windows")
    tail = traj.rho[traj.times >= traj.times[-1] - window * (1 + 1e-12)]
    change = np.max(np.abs(tail - traj.rho[-1]))
    return bool(change < config.steady_tolerance)


def liouvillian(system: LambdaSystem, kx: float, probe: float = None, control: float = None) -> np.ndarray:
    """Row-major vectorized generator ``L`` with ``d vec(rho)/dt = L vec(rho)``.

    ``probe`` and ``control`` default to the system's peak magnitudes.
    """
    probe = abs(system.omega_p) if probe is None else probe
    control = abs(system.omega_s_peak) if control is None else control
    phase_p = system.omega_p / abs(system.omega_p)
    phase_s = system.omega_s_peak / abs(system.omega_s_peak) if system.omega_s_peak != 0 else 1.0
    h = hamiltonian_matrix(phase_p * probe, phase_s * control * node_sin(kx), system.delta)
    eye = np.eye(3)
    gen = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for rate, level in ((system.decay.gamma_to_2, 1), (system.decay.gamma_to_3, 2)):
        jump = np.zeros((3, 3))
        jump[level, 0] = 1.0
        jj = jump.T @ jump
        gen += rate * (np.kron(jump, jump) - 0.5 * np.kron(jj, eye) - 0.5 * np.kron(eye, jj))
    return gen


def relaxation_rate(system: LambdaSystem, kx: float) -> float:
    """Slowest non-zero decay rate of the plateau dynamics (the Liouvillian gap).

    Handy for choosing ``t_end``: deviations from the fixed point shrink
    roughly as ``exp(-rate * t)``.
    """
    rates = np.sort(-np.linalg.eigvals(liouvillian(system, kx)).real)
    return float(rates[1])


def dark_state_fidelity(rho: DensityMatrix3, dark: StateVector3) -> float:
    """Overlap ``<Psi|rho|Psi>`` of a density matrix with the trapping state."""
    psi = dark.amplitudes
    return float(np.real(psi.conj() @ rho.elements @ psi))


def rna_valid(p_max: int, scales: PhysicalScales, omega_p: float, omega_s_peak: float,
              margin: float = 0.1) -> bool:
    """Check the Raman-Nath condition for momentum orders up to ``p_max``.

    The recoil energy of the highest order, ``p_max^2 * recoil``, must stay
    below ``margin`` times the weaker of the two Rabi frequencies.
    """
    if not 0 < margin <= 1:
        raise InvalidArgumentError("margin must lie in (0, 1]")
    if p_max < 0:
        raise InvalidArgumentError("p_max must be non-negative")
    kinetic = p_max ** 2 * scales.recoil_frequency
    coupling = min(abs(omega_p), abs(omega_s_peak)) * scales.rabi_reference
    return bool(kinetic <= margin * coupling)
