import math

import numpy as np
import pytest

from chirpramsey.pulses import ChirpPulse, PassageParams
from chirpramsey.ramsey import (FringeRecord, PhaseLaw, RamseyKernel,
                                RamseySequence, analytic_three_level,
                                analytic_two_level, run_phase_pair, run_ramsey,
                                shot_noise, three_level_amplitudes)
from chirpramsey.spectra import fft_spectrum, find_peaks, lorentzian_linewidth
from chirpramsey.spinmodel import SpinSystem
from chirpramsey.units import ANG

SYS = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=60.0)
PULSE = ChirpPulse(w_start_mhz=2750.0, w_bdw_mhz=240.0, tau_p_ns=80.0,
                   rabi_mhz=6.0)


def forced_kernel(theta=1.1, phi=0.7, frame=None):
    return RamseyKernel(SYS, PULSE, frame=frame, engine="analytic_passage",
                        passage_params=PassageParams(theta, phi))


def test_zero_drive_keeps_population():
    pulse = ChirpPulse(w_start_mhz=2750.0, w_bdw_mhz=240.0, tau_p_ns=80.0,
                       rabi_mhz=0.0)
    rec = RamseyKernel(SYS, pulse, tol=1e-9).fringe(2.0, 64, 2770.0)
    np.testing.assert_allclose(rec.p0, 1.0, atol=1e-9)


def test_analytic_two_level_basics():
    t1 = np.arange(0, 200, 0.5)
    p = analytic_two_level(10.0, 0.0, 0.0, t1)
    assert p[0] == pytest.approx(0.0, abs=1e-15)
    assert p.min() >= -1e-12 and p.max() <= 1 + 1e-12
    # oscillates at exactly the detuning frequency
    rec = FringeRecord(t1_ns=t1, p0=p)
    spec = fft_spectrum(rec)
    peaks = find_peaks(spec, threshold=0.5)
    assert len(peaks) == 1
    assert peaks[0].freq_mhz == pytest.approx(10.0, abs=spec.bin_mhz)
    # phase constants add
    np.testing.assert_allclose(analytic_two_level(10.0, 0.4, 0.6, t1),
                               analytic_two_level(10.0, 1.0, 0.0, t1),
                               atol=1e-14)


def test_three_level_amplitude_extremes():
    a1, a2 = three_level_amplitudes(0.0)
    assert (a1, a2) == (0.0, 1.0)
    a1, a2 = three_level_amplitudes(math.pi)
    assert a1 == pytest.approx(0.0, abs=1e-16)
    assert a2 == pytest.approx(0.0, abs=1e-16)
    a1, _ = three_level_amplitudes(math.pi / 2)
    assert a1 == pytest.approx(0.5 * math.cos(math.pi / 4), abs=1e-15)


def test_analytic_three_level_limits():
    t1 = np.linspace(0.0, 400.0, 101)
    # theta = 0: nothing leaves the bright state
    np.testing.assert_allclose(
        analytic_three_level(0.0, 0.3, 158.0, 38.0, 0.0, t1), 1.0, atol=1e-15)
    # theta = pi: everything leaves and nothing returns
    np.testing.assert_allclose(
        analytic_three_level(math.pi, 0.3, 158.0, 38.0, 0.0, t1), 0.0,
        atol=1e-12)


def test_engine_matches_closed_form():
    # forced passage parameters make the sequential engine an exact
    # realization of the closed-form population
    theta, phi = 1.1, 0.7
    k = forced_kernel(theta, phi)
    w_ref = 2772.0
    carry = ANG * PULSE.w_center_mhz * PULSE.tau_p_ns
    wp, wm = (2870.0 + 60.0) - w_ref, (2870.0 - 60.0) - w_ref
    for alpha in (0.0, 0.45, math.pi):
        rec = k.fringe(1.5, 400, w_ref, alpha_const_rad=alpha)
        expect = analytic_three_level(theta, phi, wp, wm, alpha, rec.t1_ns,
                                      carry_phase_rad=carry)
        np.testing.assert_allclose(rec.p0, expect, atol=1e-10)


def test_engine_matches_closed_form_off_center_frame():
    theta, phi = 0.9, -0.5
    w_frame = 2840.0
    k = forced_kernel(theta, phi, frame=w_frame)
    rec = k.fringe(1.5, 400, 2772.0, alpha_const_rad=0.3)
    expect = analytic_three_level(theta, phi, 158.0, 38.0, 0.3, rec.t1_ns,
                                  carry_phase_rad=ANG * w_frame * PULSE.tau_p_ns)
    np.testing.assert_allclose(rec.p0, expect, atol=1e-10)


def test_phase_cycle_splits_terms():
    # alpha and alpha + pi flip the single-quantum terms only, so the sum
    # keeps dc + DQ and the difference keeps the SQ pair
    theta, phi = 1.1, 0.7
    k = forced_kernel(theta, phi)
    rec_a = k.fringe(1.5, 400, 2772.0)
    rec_b = k.fringe(1.5, 400, 2772.0, alpha_const_rad=math.pi)
    a1, a2 = three_level_amplitudes(theta)
    t1 = rec_a.t1_ns
    dq = 2 * a1 * a1 * np.cos(ANG * 120.0 * t1)
    np.testing.assert_allclose((rec_a.p0 + rec_b.p0) / 2,
                               2 * a1 * a1 + a2 * a2 + dq, atol=1e-10)
    carry = ANG * PULSE.w_center_mhz * PULSE.tau_p_ns
    ph = 2.5 * phi + carry
    sq = -2 * a1 * a2 * (np.cos(ANG * 38.0 * t1 + ph)
                         + np.cos(ANG * 158.0 * t1 + ph))
    np.testing.assert_allclose((rec_a.p0 - rec_b.p0) / 2, sq, atol=1e-10)


def test_single_swept_transition_single_line(invariants):
    # the window 2770-2870 covers only the low transition at 2820, so the
    # record carries one fringe at the 50 MHz detuning and nothing else
    rec = invariants["records"][0]
    spec = fft_spectrum(rec)
    peaks = find_peaks(spec, threshold=0.15, min_separation_mhz=5.0)
    assert len(peaks) == 1
    assert peaks[0].freq_mhz == pytest.approx(50.0, abs=spec.bin_mhz)


def test_numeric_engine_line_positions(engines):
    # both transitions in the window: SQ pair offset from the reference
    # plus the DQ line at twice the Larmor frequency
    spec = engines["numeric"]["spectrum"]
    found = np.sort(engines["numeric"]["peaks"].frequencies())
    expect = np.array([2798.5 - 2770.0, 2 * 73.0, 2944.5 - 2770.0])
    assert found.size == 3
    np.testing.assert_allclose(found, expect, atol=spec.bin_mhz)


def test_alpha_constant_rotates_sq_phase():
    # the complex SQ amplitude turns by exactly -alpha; DQ stays put
    k = forced_kernel()
    rec0 = k.fringe(1.5, 600, 2772.0)
    rec1 = k.fringe(1.5, 600, 2772.0, alpha_const_rad=0.8)
    s0, s1 = fft_spectrum(rec0), fft_spectrum(rec1)
    for f_sq in (38.0, 158.0):
        a0 = s0.amp_at(f_sq)
        a1 = s1.amp_at(f_sq)
        turn = np.angle(a1 / a0)
        assert turn == pytest.approx(-0.8, abs=0.02)
    # DQ invariant up to the rect-window tails the turned SQ lines leak in
    d0, d1 = s0.amp_at(120.0), s1.amp_at(120.0)
    assert abs(d1 - d0) / abs(d0) < 2e-2


def test_run_helpers_share_kernel_results():
    seq = RamseySequence(PULSE, dt1_ns=1.5, n_points=200,
                         phase_law=PhaseLaw(2772.0, 0.2))
    rec = run_ramsey(SYS, seq, engine="analytic_passage",
                     passage_params=PassageParams(1.1, 0.7))
    pair = run_phase_pair(SYS, seq, engine="analytic_passage",
                          passage_params=PassageParams(1.1, 0.7))
    np.testing.assert_allclose(pair[0].p0, rec.p0, atol=0)
    k = forced_kernel()
    np.testing.assert_allclose(
        pair[1].p0, k.fringe(1.5, 200, 2772.0, 0.2 + math.pi).p0, atol=1e-14)


def test_t2star_damps_toward_mean_and_sets_linewidth():
    t2 = 0.4  # us
    k = forced_kernel()
    rec = k.fringe(1.5, 2000, 2772.0, t2star_us=t2)
    bare = k.fringe(1.5, 2000, 2772.0)
    dc = bare.p0.mean()
    # envelope: late-time signal collapses onto the dc level
    late = slice(-50, None)
    assert np.max(np.abs(rec.p0[late] - dc)) < 0.01 * np.max(np.abs(bare.p0 - dc))
    spec = fft_spectrum(rec, zero_pad_factor=8)
    width = lorentzian_linewidth(spec, f_center_mhz=120.0, search_mhz=6.0)
    assert width == pytest.approx(1.0 / (math.pi * t2), rel=0.1)


def test_fringe_record_validation():
    t1 = np.arange(10.0)
    with pytest.raises(ValueError):
        FringeRecord(t1_ns=t1, p0=np.full(9, 0.5))
    with pytest.raises(ValueError):
        FringeRecord(t1_ns=t1, p0=np.full(10, 1.5))
    # tiny excursions are clipped, not rejected
    rec = FringeRecord(t1_ns=t1, p0=np.full(10, 1.0 + 1e-12))
    assert rec.p0.max() <= 1.0


def test_shot_noise_statistics():
    k = forced_kernel()
    rec = k.fringe(2.0, 400, 2772.0)
    noisy1 = shot_noise(rec, photons_per_point=500, contrast=0.3, seed=11)
    noisy2 = shot_noise(rec, photons_per_point=500, contrast=0.3, seed=11)
    np.testing.assert_array_equal(noisy1.p0, noisy2.p0)
    assert noisy1.p0_sigma.shape == rec.p0.shape
    assert np.all(noisy1.p0 >= 0) and np.all(noisy1.p0 <= 1)
    # estimator converges to the underlying population
    big = shot_noise(rec, photons_per_point=2_000_000, contrast=0.3, seed=12)
    assert np.max(np.abs(big.p0 - rec.p0)) < 5e-3
    rms = np.sqrt(np.mean((noisy1.p0 - rec.p0) ** 2))
    assert rms == pytest.approx(np.mean(noisy1.p0_sigma), rel=0.35)


def test_shot_noise_zero_contrast_is_flat():
    k = forced_kernel()
    rec = k.fringe(2.0, 100, 2772.0)
    flat = shot_noise(rec, photons_per_point=400, contrast=0.0, seed=3)
    # no signal reaches the counter: the record is noise around full rate
    assert abs(flat.p0.mean() - 1.0) < 0.02
    assert np.std(flat.p0) < 0.05
    with pytest.raises(ValueError):
        shot_noise(rec, photons_per_point=0, contrast=0.5)
    with pytest.raises(ValueError):
        shot_noise(rec, photons_per_point=10, contrast=1.5)


def test_sequence_grid_and_nyquist():
    seq = RamseySequence(PULSE, dt1_ns=2.0, n_points=5,
                         phase_law=PhaseLaw(2770.0), t1_start_ns=10.0)
    np.testing.assert_allclose(seq.t1_grid_ns, [10, 12, 14, 16, 18])
    assert seq.nyquist_mhz == pytest.approx(250.0)
    with pytest.raises(ValueError):
        RamseySequence(PULSE, dt1_ns=0.0, n_points=5,
                       phase_law=PhaseLaw(2770.0))
