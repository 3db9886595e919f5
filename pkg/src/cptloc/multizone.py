"""
Repeated localization zones at moderate finesse.

Passing the atom through ``n`` identical zones and keeping only atoms found
in ``|2>`` after each one multiplies the per-zone detection probabilities,
so the peak narrows as ``rho22**n`` without raising the finesse ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import fwhm_numeric, multizone_profile
from .core import SpatialGrid, SpatialProfile
from .errors import InvalidArgumentError, OutOfDomainError
from .momentum import MomentumSpectrum, momentum_distribution

__all__ = ["ZoneSequenceResult", "run_zone_sequence", "equivalent_finesse", "multizone_width"]


@dataclass(frozen=True)
class ZoneSequenceResult:
    n_zones: int
    r: float
    profile: SpatialProfile
    fwhm: float
    spectrum: MomentumSpectrum


def _check(r, n_zones):
    if not (r > 0 and np.isfinite(r)):
        raise InvalidArgumentError("r must be positive and finite")
    if int(n_zones) != n_zones or n_zones < 1:
        raise InvalidArgumentError("n_zones must be a positive integer")


def run_zone_sequence(r: float, n_zones: int, grid: SpatialGrid, p_values,
                      amplitude_mode: str = "as_written") -> ZoneSequenceResult:
    _check(r, n_zones)
    profile = multizone_profile(r, n_zones, grid)
    return ZoneSequenceResult(
        n_zones=int(n_zones),
        r=float(r),
        profile=profile,
        fwhm=fwhm_numeric(profile),
        spectrum=momentum_distribution(profile, p_values, amplitude_mode),
    )


def _half_width_sine(r, n_zones):
    _check(r, n_zones)
    s = np.sqrt((2.0 ** (1.0 / n_zones) - 1.0) / r)
    if s > 1:
        raise OutOfDomainError(f"r={r} is too small for {n_zones} zones to reach half maximum")
    return s


def multizone_width(r: float, n_zones: int) -> float:
    """Exact FWHM of ``(1 + r sin^2 kx)^-n``: ``2 arcsin(sqrt((2^(1/n) - 1)/r))``."""
    return float(2.0 * np.arcsin(_half_width_sine(r, n_zones)))


def equivalent_finesse(r: float, n_zones: int) -> float:
    """Single-zone ratio whose ``2/sqrt(R)`` width equals the exact ``n``-zone width."""
    return float(1.0 / np.arcsin(_half_width_sine(r, n_zones)) ** 2)
