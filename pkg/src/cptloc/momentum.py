"""
Far-zone momentum distribution of atoms detected in ``|2>``.

The distribution is the squared modulus of the Fourier integral of a
localization profile over the grid window,

    P(p) = | integral g(kx) exp(i p kx) d(kx) |^2 ,

with ``p`` in units of the photon momentum ``hbar k``. ``g`` is the profile
itself (``as_written``) or its square root (``sqrt_mode``, the |2>
amplitude of the trapping state).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .core import SpatialProfile
from .errors import DegenerateInputError, InvalidArgumentError

__all__ = [
    "AMPLITUDE_MODES",
    "MomentumSpectrum",
    "default_p_grid",
    "momentum_distribution",
    "spectrum_peaks",
    "alternate_suppression",
    "second_moment",
]

AMPLITUDE_MODES = ("as_written", "sqrt_mode")


@dataclass(frozen=True)
class MomentumSpectrum:
    p_values: np.ndarray
    intensities: np.ndarray
    amplitudes: Optional[np.ndarray] = None

    def __post_init__(self):
        p = np.array(self.p_values, dtype=float)
        inten = np.array(self.intensities, dtype=float)
        if p.shape != inten.shape or p.ndim != 1:
            raise InvalidArgumentError("p_values and intensities must be 1-D and equally long")
        if p.size > 1 and not np.all(np.diff(p) > 0):
            raise InvalidArgumentError("p grid must be strictly increasing")
        if not np.all(np.isfinite(inten)) or np.any(inten < 0):
            raise InvalidArgumentError("intensities must be finite and non-negative")
        p.setflags(write=False)
        inten.setflags(write=False)
        object.__setattr__(self, "p_values", p)
        object.__setattr__(self, "intensities", inten)

    def value_at(self, p: float) -> float:
        """Intensity at the grid point nearest to ``p``."""
        return float(self.intensities[np.argmin(np.abs(self.p_values - p))])

    def normalized(self) -> np.ndarray:
        """Intensities divided by the value at ``p = 0`` (nearest grid point)."""
        ref = self.value_at(0.0)
        if ref == 0:
            raise DegenerateInputError("spectrum vanishes at p = 0")
        return self.intensities / ref


def default_p_grid(p_max: float = 12.0, step: float = 0.05) -> np.ndarray:
    """Symmetric momentum grid ``[-p_max, p_max]``; integer orders land on exact values."""
    n = int(round(p_max / step))
    inverse = 1.0 / step
    if abs(inverse - round(inverse)) < 1e-9:
        return np.arange(-n, n + 1) / round(inverse)
    return np.arange(-n, n + 1) * step


def _trapezoid_weights(n_points: int, spacing: float) -> np.ndarray:
    w = np.full(n_points, spacing)
    w[[0, -1]] = 0.5 * spacing
    return w


def _weights(n_points: int, spacing: float) -> Tuple[np.ndarray, str]:
    # Composite Simpson needs an even number of intervals.
    if (n_points - 1) % 2 == 0:
        w = np.full(n_points, 2.0)
        w[1::2] = 4.0
        w[[0, -1]] = 1.0
        return w * spacing / 3.0, "simpson"
    return _trapezoid_weights(n_points, spacing), "trapezoid"


def _simpson_amplitude(profile, p, shaped):
    kx = profile.kx
    h = profile.grid.spacing

    def amplitude(g, x, w):
        phase = np.outer(p, x)
        return (np.cos(phase) @ (w * g)) + 1j * (np.sin(phase) @ (w * g))

    w, rule = _weights(kx.size, h)
    amp = amplitude(shaped(profile.values), kx, w)
    if rule == "trapezoid" and profile.evaluator is not None:
        fine = np.linspace(kx[0], kx[-1], 2 * kx.size - 1)
        w_fine = _trapezoid_weights(fine.size, h / 2)
        amp_fine = amplitude(shaped(profile.evaluator(fine)), fine, w_fine)
        amp = (4.0 * amp_fine - amp) / 3.0
    return amp


def _spectral_amplitude(profile, p, shaped):
    # Trigonometric interpolation of the periodic samples, then exact
    # integration of each harmonic against exp(i p x) over the window:
    #   integral_{-n pi}^{n pi} exp(i (p + k/n) x) dx = 2 n pi sinc(n p + k)
    n = profile.grid.n_wavelengths
    g = shaped(profile.values)[:-1]
    size = g.size
    k = np.fft.fftfreq(size, d=1.0 / size).astype(int)
    coeff = np.fft.fft(g) / size * np.where(k % 2 == 0, 1.0, -1.0)
    if size % 2 == 0:
        # split the Nyquist term evenly between +N/2 and -N/2
        nyq = np.flatnonzero(k == -size // 2)[0]
        coeff[nyq] *= 0.5
        k = np.append(k, size // 2)
        coeff = np.append(coeff, coeff[nyq])
    kernel = np.sinc(np.add.outer(n * p, k))
    return 2.0 * n * np.pi * (kernel @ coeff)


def momentum_distribution(profile: SpatialProfile, p_values, amplitude_mode: str = "as_written",
                          method: str = "spectral") -> MomentumSpectrum:
    """Squared Fourier integral of a profile on the momentum grid ``p_values``.

    Parameters
    ----------
    profile : SpatialProfile
        Samples on a uniform grid spanning whole wavelengths.
    p_values : array_like
        Momenta in units of ``hbar k``; need not be integers.
    amplitude_mode : {"as_written", "sqrt_mode"}
        Integrate the profile itself or its square root.
    method : {"spectral", "simpson"}
        ``spectral`` interpolates the (periodic) samples by a trigonometric
        polynomial and integrates every harmonic exactly; the error falls
        off exponentially with the sampling density. ``simpson`` applies
        composite Simpson weights directly to ``g(kx) exp(i p kx)`` (the
        trapezoid rule plus one Richardson step when the interval count is
        odd); it does not assume periodicity but converges only as
        ``h**4`` at non-integer ``p``. Profiles whose end points differ are
        always integrated with ``simpson``.
    """
    if amplitude_mode not in AMPLITUDE_MODES:
        raise InvalidArgumentError(f"amplitude_mode must be one of {AMPLITUDE_MODES}")
    if method not in ("spectral", "simpson"):
        raise InvalidArgumentError("method must be 'spectral' or 'simpson'")
    kx = profile.kx
    if kx.size < 3 or not np.allclose(np.diff(kx), profile.grid.spacing, rtol=1e-9, atol=0):
        raise InvalidArgumentError("momentum_distribution needs a uniform grid of at least 3 points")
    p = np.asarray(p_values, dtype=float)

    def shaped(values):
        values = np.asarray(values, dtype=float)
        if amplitude_mode == "sqrt_mode":
            if np.any(values < 0):
                raise InvalidArgumentError("sqrt_mode needs a non-negative profile")
            return np.sqrt(values)
        return values

    periodic = abs(profile.values[0] - profile.values[-1]) <= 1e-12 * max(1.0, np.abs(profile.values).max())
    if method == "spectral" and periodic:
        amp = _spectral_amplitude(profile, p, shaped)
    else:
        amp = _simpson_amplitude(profile, p, shaped)
    return MomentumSpectrum(p, np.abs(amp) ** 2, amplitudes=amp)


def spectrum_peaks(spectrum: MomentumSpectrum) -> List[Tuple[float, float]]:
    """Interior local maxima as ``(p, intensity)`` pairs in index order.

    A run of equal values counts as one maximum if both outer neighbours
    are strictly lower; it is reported at the member with the smallest
    ``|p|``.
    """
    p, y = spectrum.p_values, spectrum.intensities
    peaks = []
    i = 1
    while i < y.size - 1:
        j = i
        while j + 1 < y.size and y[j + 1] == y[i]:
            j += 1
        if j < y.size - 1 and y[i - 1] < y[i] and y[j + 1] < y[i]:
            run = np.arange(i, j + 1)
            k = run[np.argmin(np.abs(p[run]))]
            peaks.append((float(p[k]), float(y[k])))
        i = j + 1
    return peaks


def _same_grid(a: MomentumSpectrum, b: MomentumSpectrum) -> bool:
    return a.p_values.shape == b.p_values.shape and np.array_equal(a.p_values, b.p_values)


def alternate_suppression(spectrum: MomentumSpectrum, baseline: MomentumSpectrum) -> float:
    """How strongly every other side lobe of the unlocalized spectrum is suppressed.

    The baseline (flat-profile) peaks at ``p >= 0`` are numbered outward
    from the central one (index 0). At each, the spectrum's height relative
    to its ``p = 0`` value is divided by the baseline's relative height.
    The result is the mean of those ratios over odd-numbered peaks divided
    by the mean over even-numbered ones: 1 for identical spectra, near 0
    when alternate peaks are suppressed.
    """
    if not _same_grid(spectrum, baseline):
        raise InvalidArgumentError("spectrum and baseline must share the same p grid")
    p = baseline.p_values
    index = {float(q): i for i, q in enumerate(p)}
    peak_p = [q for q, _ in spectrum_peaks(baseline) if q >= 0]
    i0 = int(np.argmin(np.abs(p)))
    if p[i0] not in peak_p:
        peak_p.insert(0, float(p[i0]))
    peak_p.sort()
    if len(peak_p) < 2:
        raise InvalidArgumentError("baseline needs at least two peaks at p >= 0")
    idx = np.array([index[q] for q in peak_p])
    rel = spectrum.normalized()[idx] / baseline.normalized()[idx]
    return float(np.mean(rel[1::2]) / np.mean(rel[0::2]))


def second_moment(spectrum: MomentumSpectrum) -> float:
    """``sum p^2 I(p) / sum I(p)`` over the grid."""
    total = spectrum.intensities.sum()
    if not total > 0:
        raise DegenerateInputError("spectrum has zero total intensity")
    return float(np.sum(spectrum.p_values ** 2 * spectrum.intensities) / total)
