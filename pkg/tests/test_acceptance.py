"""End-to-end acceptance criteria, one test per criterion.

Each test records PASS/FAIL and its runtime; the lines are printed in the
"acceptance criteria" section of the pytest summary.
"""

import time
from pathlib import Path

import numpy as np
import pytest

from cptloc import (
    DensityMatrix3,
    EvolutionConfig,
    LambdaSystem,
    PhysicalScales,
    alternate_suppression,
    dark_state,
    dark_state_fidelity,
    default_p_grid,
    evolve,
    fwhm_formula,
    fwhm_numeric,
    make_grid,
    matched_envelopes,
    momentum_distribution,
    rf_readout_profile,
    rho22_at,
    rho22_profile,
    rna_valid,
    run_zone_sequence,
    second_moment,
    steady_state_reached,
)
from cptloc.dynamics import relaxation_rate
from cptloc.scenario import parse_config, run_scenario

import oracles

# Frozen oracle values (mpmath bisection and quadrature, see tests/oracles.py).
FWHM_R1600 = 0.05000520979872227
SUPPRESSION_R4 = 0.4790263990367456
SUPPRESSION_R16 = 0.1968991168696910
ZONE_RATIOS = {1: 1.0, 2: 0.6395474416386249, 4: 0.43121824111051865}


def test_criterion_1_profile_reproduction(criterion):
    with criterion(1, "profile maxima at nodes, minima 1/(1+R) at antinodes") as rec:
        start = time.perf_counter()
        grid = make_grid(1, 720)
        kx = grid.kx_values
        at = {x: int(np.argmin(np.abs(kx - x))) for x in (-np.pi, -np.pi / 2, 0.0, np.pi / 2, np.pi)}
        for r in (0.5, 1, 2, 4, 16, 100, 1600):
            v = rho22_profile(r, grid).values
            maxima = np.flatnonzero(v == v.max())
            assert list(kx[maxima]) == [-np.pi, 0.0, np.pi]
            for x in (-np.pi / 2, np.pi / 2):
                assert abs(v[at[x]] - 1 / (1 + r)) <= 1e-12
                assert v[at[x]] == v.min()
        rec["seconds"] = time.perf_counter() - start
        assert rec["seconds"] < 1.0


def test_criterion_2_fwhm_law(criterion):
    with criterion(2, "fwhm_numeric/fwhm_formula in [1, 1.02]; R=1600 width vs bisection oracle") as rec:
        start = time.perf_counter()
        grid = make_grid(1, 720)
        widths = {}
        for r in (16, 100, 400, 1600):
            widths[r] = fwhm_numeric(rho22_profile(r, grid))
            assert 1.0 <= widths[r] / fwhm_formula(r) <= 1.02
        rec["seconds"] = time.perf_counter() - start
        # The stated target 0.0500042 sits 1.0e-6 below the bisection oracle
        # the criterion names; the oracle is authoritative.
        assert oracles.fwhm(1600) == pytest.approx(FWHM_R1600, abs=1e-15)
        assert abs(widths[1600] - FWHM_R1600) <= 1e-6
        assert rec["seconds"] < 1.0


def _acceptance_run(r, kx, delta, shape):
    system = LambdaSystem.from_ratio(r, delta=delta)
    gap = relaxation_rate(system, kx)
    if shape == "flattop":
        t_end = max(50.0, 2.0 + 14.0 / gap)
        envelopes = matched_envelopes(system, "flattop", t1=1.0, r1=0.2, t2=t_end + 10.0, r2=0.2)
    else:
        t_end = max(50.0, 40.0 / gap)
        envelopes = matched_envelopes(system, "gaussian", t0=t_end / 2, w=t_end / 4)
    config = EvolutionConfig.default_for(system, envelopes, t_end)
    traj = evolve(system, envelopes, kx, DensityMatrix3.basis(3), config)
    dark = dark_state(1.0, np.sqrt(r) * np.sin(kx))
    return (steady_state_reached(traj, config),
            abs(traj.final.populations[1] - rho22_at(r, kx)),
            dark_state_fidelity(traj.final, dark))


def test_criterion_3_dynamics_match_analytics(criterion):
    with criterion(3, "48 master-equation runs reach the dark state, rho22 within 1e-3") as rec:
        start = time.perf_counter()
        failures = []
        for r in (4, 16, 100):
            for kx in (np.pi / 8, np.pi / 4, 3 * np.pi / 8, np.pi / 2):
                for delta in (0.0, 20.0):
                    for shape in ("flattop", "gaussian"):
                        steady, err, fid = _acceptance_run(r, kx, delta, shape)
                        if not (steady and err <= 1e-3 and fid >= 0.999):
                            failures.append((r, kx, delta, shape, steady, err, fid))
        rec["seconds"] = time.perf_counter() - start
        assert failures == []
        assert rec["seconds"] < 60.0


def test_criterion_4_momentum_spectra(criterion):
    with criterion(4, "momentum spectra: closed forms, symmetry, alternate-peak suppression") as rec:
        start = time.perf_counter()
        grid, p = make_grid(1, 720), default_p_grid()
        spectra = {r: momentum_distribution(rho22_profile(r, grid), p) for r in (0, 4, 16)}
        flat = spectra[0]
        assert abs(flat.value_at(0) - 4 * np.pi ** 2) <= 1e-6
        integer = np.isin(p, np.arange(-12, 13)) & (p != 0)
        assert flat.intensities[integer].max() <= 1e-10
        assert spectra[16].value_at(0) == pytest.approx((2 * np.pi / np.sqrt(17)) ** 2, rel=1e-3)
        for s in spectra.values():
            y = s.intensities
            assert np.abs(y - y[::-1]).max() <= 1e-10 * y.max()
            assert np.abs(s.amplitudes.imag).max() <= 1e-10 * np.abs(s.amplitudes).max()
        s4 = alternate_suppression(spectra[4], flat)
        s16 = alternate_suppression(spectra[16], flat)
        assert s16 < 0.5 and s16 < s4
        assert s4 == pytest.approx(SUPPRESSION_R4, abs=1e-9)
        assert s16 == pytest.approx(SUPPRESSION_R16, abs=1e-9)
        rec["seconds"] = time.perf_counter() - start
        assert rec["seconds"] < 5.0


def test_criterion_5_momentum_localization_tradeoff(criterion):
    with criterion(5, "second moment strictly increasing over R = 0, 16, 100, 1600") as rec:
        start = time.perf_counter()
        grid, p = make_grid(1, 720), default_p_grid()
        moments = [second_moment(momentum_distribution(rho22_profile(r, grid), p)) for r in (0, 16, 100, 1600)]
        assert all(b > a for a, b in zip(moments, moments[1:]))
        rec["seconds"] = time.perf_counter() - start
        assert rec["seconds"] < 5.0


def test_criterion_6_multizone_sharpening(criterion):
    with criterion(6, "R=16 zone widths relative to one zone: 1, 0.6387, 0.4314") as rec:
        start = time.perf_counter()
        grid, p = make_grid(1, 720), default_p_grid()
        widths = {n: run_zone_sequence(16, n, grid, p).fwhm for n in (1, 2, 4)}
        stated = {1: 1.0, 2: 0.6387, 4: 0.4314}
        for n in (1, 2, 4):
            ratio = widths[n] / widths[1]
            assert abs(ratio - stated[n]) <= 1e-3
            assert abs(ratio - ZONE_RATIOS[n]) <= 1e-9
        rec["seconds"] = time.perf_counter() - start
        assert rec["seconds"] < 1.0


def test_criterion_7_raman_nath_guard(criterion):
    with criterion(7, "Raman-Nath check: true at 10 MHz coupling, false at 100 kHz") as rec:
        recoil = 2 * np.pi * 0.004
        start = time.perf_counter()
        strong = rna_valid(10, PhysicalScales(recoil, 2 * np.pi * 10.0), 1.0, 4.0)
        weak = rna_valid(10, PhysicalScales(recoil, 2 * np.pi * 0.1), 1.0, 4.0)
        rec["seconds"] = time.perf_counter() - start
        assert strong is True and weak is False
        assert rec["seconds"] < 1e-3


def test_criterion_8_rf_readout(criterion):
    with criterion(8, "rf readout: 1/2 at nodes, extremes at +-pi/2, period mean 1/2") as rec:
        start = time.perf_counter()
        grid = make_grid(1, 720)
        kx = grid.kx_values
        v = rf_readout_profile(1.0, 1.0, grid).values
        nodes = np.isin(kx, [-np.pi, 0.0, np.pi])
        assert nodes.sum() == 3 and np.all(v[nodes] == 0.5)
        assert kx[np.argmax(v)] == pytest.approx(-np.pi / 2, abs=1e-15) and abs(v.max() - 1) < 1e-15
        assert kx[np.argmin(v)] == pytest.approx(np.pi / 2, abs=1e-15) and abs(v.min()) < 1e-15
        assert abs(v[:-1].mean() - 0.5) <= 1e-10
        rec["seconds"] = time.perf_counter() - start
        assert rec["seconds"] < 1.0


SCENARIOS = {
    "profiles": '[scenario]\nkind = "sweep"\n[sweep]\nvalues = [0.5, 1, 2, 4, 16, 100, 1600]\n',
    "momentum": '[scenario]\nkind = "momentum"\n[system]\nR = [0, 4, 16]\n',
    "zones": '[scenario]\nkind = "sweep"\n[sweep]\nparameter = "n_zones"\nvalues = [1, 2, 4]\n'
             'member_kind = "multizone"\n',
}


def _csv_bodies(root: Path, run: str):
    bodies = {}
    for name, text in SCENARIOS.items():
        prefix = root / run / name
        sc = parse_config(text.replace('[scenario]\n', f'[scenario]\noutput = "{prefix}"\n', 1))
        manifest = run_scenario(sc)
        assert manifest.exit_code == 0
        for path in sorted(Path(prefix).parent.glob(f"{name}*.csv")):
            bodies[path.name] = path.read_bytes().split(b"\n", 1)[1]
    return bodies


def test_criterion_9_determinism(criterion, tmp_path):
    with criterion(9, "re-running the criterion 1, 4 and 6 scenarios gives identical CSV bodies"):
        first = _csv_bodies(tmp_path, "a")
        second = _csv_bodies(tmp_path, "b")
        # 7 profiles + summary, 3 spectra, 3 zone runs x (profile, spectrum) + summary
        assert len(first) == 7 + 1 + 3 + 3 * 2 + 1
        assert first == second
