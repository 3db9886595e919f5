"""
Domain types, spatial grids and the standing-wave field.

Conventions
-----------
Levels are labelled as in the usual Lambda scheme: ``|1>`` is the excited
state, ``|2>`` and ``|3>`` the two ground states. Array indices are the
labels minus one. All frequencies are dimensionless multiples of a reference
Rabi frequency, and position only ever enters as the dimensionless phase
``kx``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "PhysicalScales",
    "DecayModel",
    "LambdaSystem",
    "SpatialGrid",
    "SpatialProfile",
    "StateVector3",
    "DensityMatrix3",
    "make_grid",
    "standing_wave_at",
    "node_sin",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-8
NORM_TOL = 1e-12


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PhysicalScales:
    """Physical magnitudes needed to test the Raman-Nath condition.

    Parameters
    ----------
    recoil_frequency : float
        Recoil energy divided by hbar, in rad/us.
    rabi_reference : float
        Angular frequency (rad/us) of one dimensionless Rabi unit.
    """

    recoil_frequency: float
    rabi_reference: float

    def __post_init__(self):
        if not (self.recoil_frequency > 0 and np.isfinite(self.recoil_frequency)):
            raise InvalidArgumentError("recoil_frequency must be positive and finite")
        if not (self.rabi_reference > 0 and np.isfinite(self.rabi_reference)):
            raise InvalidArgumentError("rabi_reference must be positive and finite")


@dataclass(frozen=True)
class DecayModel:
    """Spontaneous decay of ``|1>``; a fraction ``branch_to_2`` lands in ``|2>``."""

    gamma_total: float = 5.0
    branch_to_2: float = 0.5

    def __post_init__(self):
        if not (self.gamma_total >= 0 and np.isfinite(self.gamma_total)):
            raise InvalidArgumentError("gamma_total must be non-negative and finite")
        if not 0.0 <= self.branch_to_2 <= 1.0:
            raise InvalidArgumentError("branch_to_2 must lie in [0, 1]")

    @property
    def gamma_to_2(self) -> float:
        return self.gamma_total * self.branch_to_2

    @property
    def gamma_to_3(self) -> float:
        return self.gamma_total * (1.0 - self.branch_to_2)


@dataclass(frozen=True)
class LambdaSystem:
    """Field amplitudes and dissipation of the driven Lambda atom.

    ``omega_p`` drives ``|1>-|3>``; ``omega_s_peak`` is the antinode value of
    the standing wave on ``|1>-|2>``. Both legs share the one-photon
    detuning ``delta`` so two-photon resonance holds by construction.
    """

    omega_p: complex
    omega_s_peak: complex
    delta: float = 0.0
    decay: DecayModel = field(default_factory=DecayModel)

    def __post_init__(self):
        if not abs(self.omega_p) > 0:
            raise InvalidArgumentError("omega_p must be non-zero so that R is finite")
        if not np.isfinite(self.delta):
            raise InvalidArgumentError("delta must be finite")

    @classmethod
    def from_ratio(cls, r: float, omega_p: float = 1.0, delta: float = 0.0,
                   decay: Optional[DecayModel] = None) -> "LambdaSystem":
        """Build a system with real positive fields and ``|Os|^2/|Op|^2 = r``."""
        if not (r >= 0 and np.isfinite(r)):
            raise InvalidArgumentError("r must be non-negative and finite")
        return cls(omega_p=omega_p, omega_s_peak=np.sqrt(r) * omega_p, delta=delta,
                   decay=decay if decay is not None else DecayModel())

    @property
    def ratio(self) -> float:
        """The finesse ratio R = |Omega_s|^2 / |Omega_p|^2."""
        return abs(self.omega_s_peak) ** 2 / abs(self.omega_p) ** 2


@dataclass(frozen=True)
class SpatialGrid:
    kx_values: np.ndarray
    n_wavelengths: int
    samples_per_wavelength: int

    @property
    def spacing(self) -> float:
        return 2.0 * np.pi / self.samples_per_wavelength

    @property
    def size(self) -> int:
        return self.kx_values.size

    def __len__(self):
        return self.kx_values.size

    def __eq__(self, other):
        if not isinstance(other, SpatialGrid):
            return NotImplemented
        return (self.n_wavelengths == other.n_wavelengths
                and self.samples_per_wavelength == other.samples_per_wavelength)

    def __hash__(self):
        return hash((self.n_wavelengths, self.samples_per_wavelength))


def make_grid(n_wavelengths: int, samples_per_wavelength: int) -> SpatialGrid:
    """Uniform grid on ``[-n*pi, n*pi]`` with ``n*s + 1`` points.

    Points are generated as ``pi * (2i - n s) / s`` so that nodes
    (multiples of pi) and antinodes land on exact floating point values
    whenever ``s`` is divisible by 4.

    >>> make_grid(1, 4).kx_values / np.pi
    array([-1. , -0.5,  0. ,  0.5,  1. ])
    """
    for name, value in (("n_wavelengths", n_wavelengths),
                        ("samples_per_wavelength", samples_per_wavelength)):
        if int(value) != value or value < 1:
            raise InvalidArgumentError(f"{name} must be a positive integer, got {value!r}")
    n, s = int(n_wavelengths), int(samples_per_wavelength)
    total = n * s
    ticks = (2 * np.arange(total + 1) - total) / s
    return SpatialGrid(_frozen_array(np.pi * ticks), n, s)


@dataclass(frozen=True)
class SpatialProfile:
    """A real function of ``kx`` sampled on a grid.

    ``evaluator``, when present, is the exact function the samples came
    from; width measurements refine crossings on it rather than on an
    interpolant of the samples.
    """

    grid: SpatialGrid
    values: np.ndarray
    evaluator: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, compare=False, repr=False)

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.shape != self.grid.kx_values.shape:
            raise InvalidArgumentError("profile values must match the grid length")
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("profile values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def kx(self) -> np.ndarray:
        return self.grid.kx_values

    def __call__(self, kx):
        if self.evaluator is not None:
            return self.evaluator(np.asarray(kx, dtype=float))
        return np.interp(kx, self.grid.kx_values, self.values)

    def is_population(self) -> bool:
        return bool(np.all((self.values >= 0.0) & (self.values <= 1.0)))


@dataclass(frozen=True)
class StateVector3:
    """Normalized state amplitudes ordered ``(|1>, |2>, |3>)``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes, complex)
        if amps.shape != (3,):
            raise InvalidArgumentError("a three-level state needs exactly 3 amplitudes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidArgumentError(f"state is not normalized (norm={norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def density_matrix(self) -> "DensityMatrix3":
        return DensityMatrix3(np.outer(self.amplitudes, self.amplitudes.conj()))


def check_density_matrices(rho: np.ndarray, *, hermitian_tol=HERMITIAN_TOL,
                           trace_tol=TRACE_TOL, positivity_tol=POSITIVITY_TOL) -> np.ndarray:
    """Return a boolean mask of the matrices in a ``(..., 3, 3)`` stack that are physical."""
    rho = np.asarray(rho, dtype=complex)
    herm = np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2))), axis=(-1, -2)) <= hermitian_tol
    trace = np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0) <= trace_tol
    herm_part = 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))
    positive = np.linalg.eigvalsh(herm_part).min(axis=-1) >= -positivity_tol
    return herm & trace & positive


@dataclass(frozen=True)
class DensityMatrix3:
    """Hermitian, unit-trace, positive 3x3 density matrix."""

    elements: np.ndarray

    def __post_init__(self):
        rho = _frozen_array(self.elements, complex)
        if rho.shape != (3, 3):
            raise InvalidArgumentError("density matrix must be 3x3")
        if not check_density_matrices(rho):
            raise InvalidArgumentError("matrix is not a valid density matrix")
        object.__setattr__(self, "elements", rho)

    @classmethod
    def _trusted(cls, elements: np.ndarray) -> "DensityMatrix3":
        # Caller has already validated a whole stack of matrices.
        obj = object.__new__(cls)
        object.__setattr__(obj, "elements", _frozen_array(elements, complex))
        return obj

    @classmethod
    def basis(cls, level: int) -> "DensityMatrix3":
        """Pure state ``|level><level|`` with ``level`` in {1, 2, 3}."""
        if level not in (1, 2, 3):
            raise InvalidArgumentError("level must be 1, 2 or 3")
        rho = np.zeros((3, 3), complex)
        rho[level - 1, level - 1] = 1.0
        return cls(rho)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix3":
        return cls(np.eye(3, dtype=complex) / 3.0)

    def element(self, i: int, j: int) -> complex:
        """``rho_ij`` using the 1-based level labels."""
        return complex(self.elements[i - 1, j - 1])

    @property
    def populations(self) -> np.ndarray:
        return self.elements.diagonal().real.copy()


def node_sin(kx):
    """``sin(kx)`` that is exactly zero at the grid's nodes ``m * np.pi``.

    The argument is reduced by the nearest multiple of ``np.pi`` first, so
    the rounding of pi itself does not leave a ~1e-16 residue at nodes.
    """
    kx = np.asarray(kx, dtype=float)
    m = np.rint(kx / np.pi)
    sign = np.where(np.mod(m, 2.0) == 0.0, 1.0, -1.0)
    out = sign * np.sin(kx - m * np.pi)
    return out if out.ndim else float(out)


def standing_wave_at(system: LambdaSystem, kx):
    """Local control Rabi frequency ``Omega_s sin(kx)``; works on arrays."""
    return system.omega_s_peak * node_sin(kx)
