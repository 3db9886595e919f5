import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cptloc import (
    dark_state,
    fabry_perot_reference,
    fwhm_formula,
    fwhm_numeric,
    hamiltonian_matrix,
    make_grid,
    multizone_profile,
    rf_readout_profile,
    rho22_at,
    rho22_profile,
    rho23_at,
)
from cptloc.core import SpatialProfile
from cptloc.errors import DegenerateInputError, NoPeaksError, ResolutionError

import oracles

# Frozen from oracles.fwhm (mpmath bisection on the closed form, 30 digits).
FWHM_R16 = 0.5053605102841573
FWHM_R100 = 0.2003348423231196
FWHM_R1600 = 0.05000520979872227
FWHM_R16_N2 = 0.3232020214574228
FWHM_R16_N4 = 0.2179206703714485

complex_amp = st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False)


def test_frozen_widths_match_oracle():
    assert oracles.fwhm(16) == pytest.approx(FWHM_R16, abs=1e-15)
    assert oracles.fwhm(16, 4) == pytest.approx(FWHM_R16_N4, abs=1e-15)
    assert oracles.fwhm(1600) == pytest.approx(oracles.closed_form_fwhm(1600), abs=1e-15)


class TestDarkState:
    def test_node(self):
        np.testing.assert_allclose(dark_state(1.0, 0.0).amplitudes, [0, 1, 0])

    def test_equal_fields(self):
        np.testing.assert_allclose(dark_state(1.0, 1.0).amplitudes, [0, 1 / np.sqrt(2), -1 / np.sqrt(2)])

    def test_degenerate(self):
        with pytest.raises(DegenerateInputError):
            dark_state(0.0, 0.0)

    @given(complex_amp, complex_amp, st.floats(-50, 50))
    def test_annihilated_by_hamiltonian(self, op, os_x, delta):
        if abs(op) ** 2 + abs(os_x) ** 2 < 1e-6:
            return
        psi = dark_state(op, os_x).amplitudes
        assert np.linalg.norm(hamiltonian_matrix(op, os_x, delta) @ psi) <= 1e-12 * max(1.0, abs(op), abs(os_x))

    @given(st.floats(0, 2000), st.floats(-10, 10), st.floats(0.1, 10))
    def test_population_matches_rho22(self, r, kx, op):
        psi = dark_state(op, np.sqrt(r) * op * np.sin(kx))
        assert abs(psi.populations[1] - rho22_at(r, kx)) < 1e-12

    @given(complex_amp, complex_amp)
    def test_coherence_is_pure_state(self, op, os_x):
        if abs(op) ** 2 + abs(os_x) ** 2 < 1e-6:
            return
        psi = dark_state(op, os_x)
        rho23 = rho23_at(op, os_x)
        pops = psi.populations
        assert abs(abs(rho23) ** 2 - pops[1] * pops[2]) < 1e-12
        amps = psi.amplitudes
        assert abs(rho23 - amps[1] * np.conj(amps[2])) < 1e-12
        assert abs(rho23) <= 0.5 + 1e-15


class TestRho22:
    def test_uniform_at_zero_ratio(self):
        assert np.all(rho22_at(0.0, np.linspace(-4, 4, 51)) == 1.0)

    def test_values(self):
        assert rho22_at(16, np.pi / 2) == pytest.approx(1 / 17, abs=1e-15)
        assert rho22_at(1600, 0.0) == 1.0

    def test_profile_extrema(self, grid720):
        prof = rho22_profile(16, grid720)
        kx = grid720.kx_values
        for node in (-np.pi, 0.0, np.pi):
            assert prof.values[np.argmin(abs(kx - node))] == 1.0
        for anti in (-np.pi / 2, np.pi / 2):
            assert prof.values[np.argmin(abs(kx - anti))] == 1 / 17

    @given(st.floats(0, 5000), st.floats(-20, 20))
    def test_defining_algebra(self, r, kx):
        v = rho22_at(r, kx)
        assert abs(v + r * np.sin(kx) ** 2 * v - 1) < 1e-12
        assert 0 < v <= 1

    @given(st.floats(0, 5000), st.floats(-20, 20))
    def test_even_and_pi_periodic(self, r, kx):
        v = rho22_at(r, kx)
        assert abs(v - rho22_at(r, -kx)) < 1e-12
        assert abs(v - rho22_at(r, kx + np.pi)) < 1e-12


class TestRho23:
    def test_values(self):
        assert rho23_at(1.0, 0.0) == 0
        assert rho23_at(1.0, 1.0) == pytest.approx(-0.5)

    def test_conjugation(self):
        assert rho23_at(1.0, 1j) == pytest.approx(1j / 2)


class TestFwhm:
    @pytest.mark.parametrize("r, expected", [(1600, 0.05), (16, 0.5), (4, 1.0)])
    def test_formula(self, r, expected):
        assert fwhm_formula(r) == pytest.approx(expected, rel=1e-15)

    def test_formula_no_peaks(self):
        with pytest.raises(NoPeaksError):
            fwhm_formula(0)

    @pytest.mark.parametrize("r, expected", [(16, FWHM_R16), (100, FWHM_R100), (1600, FWHM_R1600)])
    def test_numeric_matches_oracle(self, grid720, r, expected):
        assert fwhm_numeric(rho22_profile(r, grid720)) == pytest.approx(expected, abs=1e-10)

    def test_numeric_without_evaluator_uses_spline(self, fine_grid):
        prof = rho22_profile(16, fine_grid)
        bare = SpatialProfile(fine_grid, prof.values)
        assert fwhm_numeric(bare) == pytest.approx(FWHM_R16, abs=1e-9)

    def test_flat_profile(self, grid720):
        with pytest.raises(NoPeaksError):
            fwhm_numeric(rho22_profile(0, grid720))

    def test_never_reaches_half(self, grid720):
        with pytest.raises(NoPeaksError):
            fwhm_numeric(rho22_profile(0.5, grid720))

    def test_coarse_grid_without_evaluator(self):
        grid = make_grid(1, 16)
        bare = SpatialProfile(grid, rho22_profile(1600, grid).values)
        with pytest.raises(ResolutionError):
            fwhm_numeric(bare)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(16, 5000))
    def test_ratio_to_formula(self, r):
        ratio = fwhm_numeric(rho22_profile(r, make_grid(1, 720))) / fwhm_formula(r)
        assert 1.0 <= ratio <= 1.02


class TestFabryPerot:
    def test_identical_to_rho22(self, grid720):
        np.testing.assert_array_equal(fabry_perot_reference(16, grid720).values, rho22_profile(16, grid720).values)

    def test_flat(self, grid720):
        assert np.all(fabry_perot_reference(0, grid720).values == 1.0)

    @pytest.mark.parametrize("coefficient", [0.5, 16.0, 400.0])
    def test_contrast(self, grid720, coefficient):
        v = fabry_perot_reference(coefficient, grid720).values
        assert v.max() / v.min() == pytest.approx(1 + coefficient, rel=1e-12)


class TestRfReadout:
    def test_nodes_exactly_half(self):
        grid = make_grid(3, 720)
        prof = rf_readout_profile(1.3, 7.0, grid)
        nodes = np.isclose(np.mod(grid.kx_values, np.pi), 0) | np.isclose(np.mod(grid.kx_values, np.pi), np.pi)
        assert np.all(prof.values[nodes] == 0.5)

    def test_extremes(self, grid720):
        prof = rf_readout_profile(1.0, 1.0, grid720)
        kx = grid720.kx_values
        assert prof.values[np.argmin(abs(kx - np.pi / 2))] == pytest.approx(0.0, abs=1e-15)
        assert prof.values[np.argmin(abs(kx + np.pi / 2))] == pytest.approx(1.0, abs=1e-15)

    @given(st.floats(0.01, 10), st.floats(0, 100))
    def test_bounded_and_mean_half(self, op, os_peak):
        grid = make_grid(1, 64)
        v = rf_readout_profile(op, os_peak, grid).values
        assert np.all((v >= -1e-12) & (v <= 1 + 1e-12))
        assert abs(v[:-1].mean() - 0.5) < 1e-10


class TestMultizone:
    def test_single_zone_reduces(self, grid720):
        np.testing.assert_array_equal(multizone_profile(16, 1, grid720).values, rho22_profile(16, grid720).values)

    def test_two_zones_antinode(self):
        assert multizone_profile(16, 2, make_grid(1, 4)).values[1] == pytest.approx((1 / 17) ** 2, rel=1e-14)

    @pytest.mark.parametrize("n, expected", [(2, FWHM_R16_N2), (4, FWHM_R16_N4)])
    def test_width(self, grid720, n, expected):
        assert fwhm_numeric(multizone_profile(16, n, grid720)) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("r", [1.0, 4.0, 16.0, 100.0])
    def test_monotone_in_zone_count(self, grid720, r):
        profiles = [multizone_profile(r, n, grid720).values for n in (1, 2, 3, 4)]
        for a, b in zip(profiles, profiles[1:]):
            assert np.all(b <= a)
        widths = [fwhm_numeric(multizone_profile(r, n, grid720)) for n in (1, 2, 3, 4)]
        assert all(b < a for a, b in zip(widths, widths[1:]))
