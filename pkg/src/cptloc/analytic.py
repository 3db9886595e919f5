"""
Closed-form steady-state quantities of the coherently trapped atom.

Once the atom sits in the dark state ``(Op|2> - Os(x)|3>)/Omega`` every
observable is an explicit function of ``kx`` and the finesse ratio
``R = |Os|^2/|Op|^2``. This module evaluates those functions and the
peak widths derived from them.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect

from .core import SpatialGrid, SpatialProfile, StateVector3, node_sin
from .errors import DegenerateInputError, InvalidArgumentError, NoPeaksError, ResolutionError

__all__ = [
    "dark_state",
    "rho22_at",
    "rho22_profile",
    "rho23_at",
    "fwhm_formula",
    "fwhm_numeric",
    "fabry_perot_reference",
    "rf_readout_at",
    "rf_readout_profile",
    "multizone_at",
    "multizone_profile",
]

BISECTION_XTOL = 1e-12


def _check_ratio(r) -> float:
    r = float(r)
    if not (r >= 0 and np.isfinite(r)):
        raise InvalidArgumentError(f"finesse ratio must be non-negative and finite, got {r!r}")
    return r


def _omega_squared(omega_p, omega_s_x):
    total = np.abs(omega_p) ** 2 + np.abs(omega_s_x) ** 2
    if np.any(total == 0):
        raise DegenerateInputError("dark state undefined for Omega_p = Omega_s(x) = 0")
    return total


def dark_state(omega_p: complex, omega_s_x: complex) -> StateVector3:
    """Trapping state ``(0, Op/Omega, -Os(x)/Omega)`` in the ``(|1>,|2>,|3>)`` basis."""
    omega = np.sqrt(_omega_squared(omega_p, omega_s_x))
    return StateVector3(np.array([0.0, omega_p / omega, -omega_s_x / omega], dtype=complex))


def rho22_at(r: float, kx):
    """Population of ``|2>`` in the dark state, ``1 / (1 + R sin^2 kx)``."""
    r = _check_ratio(r)
    return 1.0 / (1.0 + r * node_sin(kx) ** 2)


def rho22_profile(r: float, grid: SpatialGrid) -> SpatialProfile:
    r = _check_ratio(r)
    return SpatialProfile(grid, rho22_at(r, grid.kx_values), evaluator=lambda kx: rho22_at(r, kx))


def rho23_at(omega_p: complex, omega_s_x: complex) -> complex:
    """Ground-state coherence ``-Op Os*(x) / Omega^2`` of the dark state."""
    omega_sq = _omega_squared(omega_p, omega_s_x)
    return -omega_p * np.conj(omega_s_x) / omega_sq


def fwhm_formula(r: float) -> float:
    """Approximate peak width ``k dx = 2/sqrt(R)``, valid for large R."""
    r = _check_ratio(r)
    if r == 0:
        raise NoPeaksError("R = 0 gives a flat profile with no peaks")
    return 2.0 / np.sqrt(r)


def _central_peak_index(kx, values):
    inside = np.flatnonzero(np.abs(kx) < np.pi / 2)
    if inside.size == 0:
        raise ResolutionError("no samples inside the central half period")
    best = values[inside].max()
    candidates = inside[values[inside] == best]
    return int(candidates[np.argmin(np.abs(kx[candidates]))])


def _half_crossing(values, start, step, half):
    j = start + step
    while 0 <= j < values.size and values[j] > half:
        j += step
    if not 0 <= j < values.size:
        return None
    return j


def fwhm_numeric(profile: SpatialProfile) -> float:
    """Full width at half maximum of the peak nearest ``kx = 0``.

    The crossings are bracketed between neighbouring samples and refined by
    bisection, on the profile's exact evaluator if it has one and on a
    cubic spline through the samples otherwise.

    Raises
    ------
    NoPeaksError
        The profile is flat or never drops to half its maximum.
    ResolutionError
        The grid does not resolve the peak well enough to bracket it.
    """
    kx, y = profile.kx, profile.values
    ipk = _central_peak_index(kx, y)
    peak = y[ipk]
    if peak <= 0 or np.ptp(y) <= 1e-12 * abs(peak):
        raise NoPeaksError("profile is flat; no localization peak")
    half = 0.5 * peak
    if y.min() > half:
        raise NoPeaksError("profile never falls to half of its maximum")

    right = _half_crossing(y, ipk, +1, half)
    left = _half_crossing(y, ipk, -1, half)
    if right is None or left is None:
        raise ResolutionError("half-maximum crossing lies outside the grid window")

    func = profile.evaluator
    if func is None:
        if right - ipk < 2 or ipk - left < 2:
            raise ResolutionError("peak is narrower than the grid spacing")
        func = CubicSpline(kx, y)

    def shifted(x):
        return float(func(x)) - half

    x_right = bisect(shifted, kx[right - 1], kx[right], xtol=BISECTION_XTOL)
    x_left = bisect(shifted, kx[left], kx[left + 1], xtol=BISECTION_XTOL)
    return float(x_right - x_left)


def fabry_perot_reference(coefficient: float, grid: SpatialGrid) -> SpatialProfile:
    """Airy transmission ``1 / (1 + F sin^2 kx)`` with coefficient of finesse ``F``.

    This is literally the same function as :func:`rho22_profile`; the finesse
    ratio of the atom plays the part of the cavity's coefficient of finesse.
    """
    return rho22_profile(coefficient, grid)


def rf_readout_at(omega_p: float, omega_s_peak: float, kx):
    """Population of ``|2>`` after an rf pi/2 pulse on the dark state.

    ``P2 = 1/2 - Op Os sin(kx) / (Op^2 + Os^2 sin^2 kx)``, exactly 1/2 at nodes.
    """
    if not omega_p > 0:
        raise InvalidArgumentError("omega_p must be positive")
    s = node_sin(kx)
    return 0.5 - omega_p * omega_s_peak * s / (omega_p ** 2 + omega_s_peak ** 2 * s ** 2)


def rf_readout_profile(omega_p: float, omega_s_peak: float, grid: SpatialGrid) -> SpatialProfile:
    values = rf_readout_at(omega_p, omega_s_peak, grid.kx_values)
    return SpatialProfile(grid, values,
                          evaluator=lambda kx: rf_readout_at(omega_p, omega_s_peak, kx))


def multizone_at(r: float, n_zones: int, kx):
    """Probability of detecting ``|2>`` after each of ``n_zones`` identical zones."""
    if int(n_zones) != n_zones or n_zones < 1:
        raise InvalidArgumentError("n_zones must be a positive integer")
    return rho22_at(r, kx) ** int(n_zones)


def multizone_profile(r: float, n_zones: int, grid: SpatialGrid) -> SpatialProfile:
    r = _check_ratio(r)
    values = multizone_at(r, n_zones, grid.kx_values)
    return SpatialProfile(grid, values, evaluator=lambda kx: multizone_at(r, n_zones, kx))
