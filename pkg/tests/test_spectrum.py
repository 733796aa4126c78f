import math

import numpy as np
import pytest

from elliptic_doa import beamform, channel, spectrum
from elliptic_doa.errors import DegenerateInputError, DomainError

import oracles

GRID = channel.FrequencyGrid(f_start_hz=28e9, bandwidth_hz=2e9, samples=20)


def ideal_modes(mode_half, grid, phi_deg, tau_s, scale=1.0):
    """Noise-free mode matrix of a single path: scale * e^{jm phi} e^{j2pi f tau}."""
    m = np.arange(-mode_half, mode_half + 1)
    h0 = scale * np.exp(2j * np.pi * grid.frequencies * tau_s)
    values = np.exp(1j * m[:, None] * math.radians(phi_deg)) * h0
    return beamform.ModeMatrix(values=values, mode_half=mode_half, grid=grid)


def test_pad_validation():
    mm = ideal_modes(4, GRID, 0.0, 0.0)
    with pytest.raises(DomainError):
        spectrum.joint_spectrum(mm, pad_az=0)


def test_axes_and_bin_mapping():
    mm = ideal_modes(10, GRID, 0.0, 0.0)
    sp = spectrum.joint_spectrum(mm, pad_az=4, pad_delay=2)
    assert sp.magnitudes.shape == (21 * 4, 20 * 2)
    assert sp.azimuth_of_bin(21) == (21 * 360.0) / 84
    assert sp.delay_of_bin(3) == 3 / (2 * GRID.bandwidth_hz)
    assert sp.azimuth_bins_deg[0] == 0.0
    assert sp.delay_bins_s[-1] == pytest.approx((39) / (2 * 2e9), rel=1e-15)


def test_on_grid_exponential_hits_exact_bin():
    mh = 10  # M = 21 azimuth bins; phi on bin 7 = 120 deg; tau on bin 6
    tau = 6 / GRID.bandwidth_hz
    mm = ideal_modes(mh, GRID, 120.0, tau)
    sp = spectrum.joint_spectrum(mm)
    rep = spectrum.find_peaks(sp)
    assert rep.main.phi_deg == (7 * 360.0) / 21
    assert rep.main.tau_s == 6 / GRID.bandwidth_hz
    assert rep.delta_db >= 60.0  # numerically clean input


def test_all_ones_peaks_at_zero():
    mm = beamform.ModeMatrix(values=np.ones((21, 20), dtype=complex),
                             mode_half=10, grid=GRID)
    rep = spectrum.find_peaks(spectrum.joint_spectrum(mm))
    assert rep.main.phi_deg == 0.0
    assert rep.main.tau_s == 0.0


def test_azimuth_shift_theorem():
    mh = 12
    step = 360.0 / 25
    base = spectrum.find_peaks(
        spectrum.joint_spectrum(ideal_modes(mh, GRID, 3 * step, 0.0)))
    shifted = spectrum.find_peaks(
        spectrum.joint_spectrum(ideal_modes(mh, GRID, 4 * step, 0.0)))
    assert shifted.main.phi_deg == pytest.approx(base.main.phi_deg + step, rel=1e-12)


def test_delay_shift_theorem():
    mh = 8
    tau0 = 4 / GRID.bandwidth_hz
    dtau = 1 / GRID.bandwidth_hz
    base = spectrum.find_peaks(spectrum.joint_spectrum(ideal_modes(mh, GRID, 40.0, tau0)))
    moved = spectrum.find_peaks(
        spectrum.joint_spectrum(ideal_modes(mh, GRID, 40.0, tau0 + dtau)))
    assert moved.main.tau_s == pytest.approx(base.main.tau_s + dtau, rel=1e-12)


def test_scaling_leaves_delta_invariant():
    mm = ideal_modes(10, GRID, 77.0, 3.3e-9)
    big = beamform.ModeMatrix(values=7.25 * mm.values, mode_half=10, grid=GRID)
    a = spectrum.find_peaks(spectrum.joint_spectrum(mm))
    b = spectrum.find_peaks(spectrum.joint_spectrum(big))
    assert b.main.magnitude == pytest.approx(7.25 * a.main.magnitude, rel=1e-12)
    assert b.delta_db == a.delta_db  # ratio is exactly scale-free
    assert (b.main.phi_deg, b.main.tau_s) == (a.main.phi_deg, a.main.tau_s)


def test_matches_brute_force_dft():
    rng = np.random.default_rng(3)
    mh, k = 4, 6
    values = rng.normal(size=(9, k)) + 1j * rng.normal(size=(9, k))
    grid = channel.FrequencyGrid(f_start_hz=1e9, bandwidth_hz=0.5e9, samples=k)
    mm = beamform.ModeMatrix(values=values, mode_half=mh, grid=grid)
    got = spectrum.joint_spectrum(mm).magnitudes
    want = oracles.brute_joint_spectrum(values, mh, k)
    assert np.abs(got - want).max() <= 1e-10 * want.max()


def test_find_peaks_with_expected_window():
    mh = 16
    tau = 5 / GRID.bandwidth_hz
    phi = (8 * 360.0) / 33
    strong = ideal_modes(mh, GRID, phi, tau).values
    weak = 0.25 * ideal_modes(mh, GRID, phi + 180.0, tau).values
    mm = beamform.ModeMatrix(values=strong + weak, mode_half=mh, grid=GRID)
    sp = spectrum.joint_spectrum(mm)
    free = spectrum.find_peaks(sp)
    assert free.main.phi_deg == pytest.approx(phi, rel=1e-12)
    # anchoring on the weak ray flips the ratio negative
    anchored = spectrum.find_peaks(sp, expected=(phi + 180.0, tau))
    assert anchored.main.phi_deg == pytest.approx((phi + 180.0) % 360.0, abs=360 / 33)
    assert anchored.delta_db < 0.0
    assert free.delta_db == pytest.approx(-anchored.delta_db, abs=1e-9)


def test_two_ray_ranked_maxima():
    mh = 40
    tau1, tau2 = 4 / GRID.bandwidth_hz, 8 / GRID.bandwidth_hz
    phi1 = (74 * 360.0) / 81  # on-grid bins
    phi2 = (67 * 360.0) / 81
    v = (ideal_modes(mh, GRID, phi1, tau1).values
         + 0.8 * ideal_modes(mh, GRID, phi2, tau2).values)
    mm = beamform.ModeMatrix(values=v, mode_half=mh, grid=GRID)
    rep = spectrum.find_peaks(spectrum.joint_spectrum(mm))
    top2 = {(round(p.phi_deg, 6), round(p.tau_s * 1e12, 3)) for p in rep.maxima[:2]}
    assert top2 == {(round(phi1, 6), round(tau1 * 1e12, 3)),
                    (round(phi2, 6), round(tau2 * 1e12, 3))}


def test_zero_spectrum_rejected():
    mm = beamform.ModeMatrix(values=np.zeros((5, 4), dtype=complex), mode_half=2,
                             grid=channel.FrequencyGrid(1e9, 1e9, 4))
    with pytest.raises(DegenerateInputError):
        spectrum.find_peaks(spectrum.joint_spectrum(mm))


def test_padding_changes_delta_slowly():
    # once the map is oversampled (pad >= 2) more padding barely moves the
    # ratio; pad = 1 may sit a few dB high from artifact scalloping, which the
    # pipeline-level stability check covers on the reference scenario
    mm = ideal_modes(30, GRID, 41.3, 7.7e-9)
    deltas = []
    for pad in (2, 4, 8):
        rep = spectrum.find_peaks(spectrum.joint_spectrum(mm, pad_az=pad, pad_delay=pad))
        deltas.append(rep.delta_db)
    assert max(deltas) - min(deltas) <= 0.5


def test_exports(tmp_path):
    mm = ideal_modes(6, GRID, 0.0, 2e-9)
    sp = spectrum.joint_spectrum(mm)
    csv_path = tmp_path / "spec.csv"
    sp.export_csv(csv_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "phi_deg,tau_s,mag_db"
    assert len(lines) == 1 + 13 * 20
    peak_rows = [l for l in lines[1:] if l.endswith(",0")]
    assert peak_rows  # peak normalized to 0 dB

    pgm_path = tmp_path / "spec.pgm"
    sp.export_pgm(pgm_path)
    blob = pgm_path.read_bytes()
    assert blob.startswith(b"P5\n")
    header, rest = blob.split(b"255\n", 1)
    assert len(rest) == 13 * 20
    assert max(rest) == 255
    # byte-determinism
    sp.export_pgm(tmp_path / "again.pgm")
    assert (tmp_path / "again.pgm").read_bytes() == blob


def test_report_text():
    mm = ideal_modes(6, GRID, 60.0, 2e-9)
    rep = spectrum.find_peaks(spectrum.joint_spectrum(mm))
    text = rep.to_text()
    assert "main:" in text and "delta_db=" in text and "rank 0:" in text
