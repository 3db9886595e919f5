"""
cptloc: subwavelength atom localization by coherent population trapping.

A Lambda atom driven by a weak probe and a standing-wave control field
relaxes into a position-dependent dark state. The package provides the
closed-form localization profiles (:mod:`cptloc.analytic`), a master
equation integrator for the approach to that state (:mod:`cptloc.dynamics`),
far-zone momentum spectra (:mod:`cptloc.momentum`), repeated-zone
composition (:mod:`cptloc.multizone`) and a scenario runner that writes CSV
results (:mod:`cptloc.scenario`, ``cptloc`` on the command line).
"""

__version__ = "0.1.0"

from .analytic import (
    dark_state,
    fabry_perot_reference,
    fwhm_formula,
    fwhm_numeric,
    multizone_profile,
    rf_readout_profile,
    rho22_at,
    rho22_profile,
    rho23_at,
)
from .core import (
    DecayModel,
    DensityMatrix3,
    LambdaSystem,
    PhysicalScales,
    SpatialGrid,
    SpatialProfile,
    StateVector3,
    make_grid,
    standing_wave_at,
)
from .dynamics import (
    EvolutionConfig,
    PulseEnvelope,
    Trajectory,
    dark_state_fidelity,
    evolve,
    hamiltonian_matrix,
    matched_envelopes,
    rna_valid,
    steady_state_reached,
)
from .errors import CPTLocError
from .momentum import (
    MomentumSpectrum,
    alternate_suppression,
    default_p_grid,
    momentum_distribution,
    second_moment,
    spectrum_peaks,
)
from .multizone import ZoneSequenceResult, equivalent_finesse, run_zone_sequence
