import math
import warnings

import numpy as np
import pytest

from chirpramsey.linalg import expm_hermitian, is_unitary
from chirpramsey.pulses import (CalibrationError, ChirpPulse, PassageParams,
                                S1_COUPLING_SCALE, calibrate_rabi,
                                drive_and_projector, fit_passage_params,
                                lz_seed_rabi_mhz, passage_transfer,
                                passage_unitary, pulse_propagator,
                                sequential_passage_model, swept_transitions)
from chirpramsey.spinmodel import NuclearSpin, Species, SpinSystem, build_hamiltonian
from chirpramsey.units import ANG


def test_chirp_pulse_derived_quantities():
    p = ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=250.0, tau_p_ns=120.0,
                   rabi_mhz=9.0, phase0_rad=0.3)
    assert p.rate_mhz_per_ns == pytest.approx(250.0 / 120.0)
    assert p.w_center_mhz == pytest.approx(2895.0)
    assert p.w_end_mhz == pytest.approx(3020.0)
    assert p.instantaneous_freq_mhz(0.0) == pytest.approx(2770.0)
    assert p.instantaneous_freq_mhz(120.0) == pytest.approx(3020.0)
    # the waveform phase must integrate the instantaneous frequency
    t = np.linspace(1.0, 119.0, 41)
    eps = 1e-4
    dphi = (p.waveform_phase_rad(t + eps) - p.waveform_phase_rad(t - eps)) / (2 * eps)
    np.testing.assert_allclose(dphi, ANG * p.instantaneous_freq_mhz(t),
                               rtol=1e-7)
    assert p.waveform_phase_rad(0.0) == pytest.approx(0.3)


def test_chirp_pulse_validation():
    with pytest.raises(ValueError):
        ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=250.0, tau_p_ns=0.0, rabi_mhz=1.0)
    with pytest.raises(ValueError):
        ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=-1.0, tau_p_ns=10.0, rabi_mhz=1.0)
    with pytest.raises(ValueError):
        ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=250.0, tau_p_ns=10.0, rabi_mhz=-2.0)


def test_drive_and_projector_shapes():
    drive, n = drive_and_projector(2)
    np.testing.assert_allclose(drive, [[0.0, 0.5], [0.5, 0.0]], atol=0)
    np.testing.assert_array_equal(n, [1.0, 0.0])
    drive, n = drive_and_projector(6)
    np.testing.assert_array_equal(n, [1, 1, 0, 0, 1, 1])
    assert drive.shape == (6, 6)
    assert abs(drive[0, 2] - 1 / math.sqrt(2)) < 1e-15
    with pytest.raises(ValueError):
        drive_and_projector(4)


def test_zero_amplitude_is_free_evolution():
    # with no drive the frame propagator is exp(-i (h0 - w_f N) tau) exactly
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=55.0)
    h0 = build_hamiltonian(sys)
    pulse = ChirpPulse(w_start_mhz=2750.0, w_bdw_mhz=130.0, tau_p_ns=37.0,
                       rabi_mhz=0.0)
    prop = pulse_propagator(h0, pulse, tol=1e-10)
    _, n = drive_and_projector(3)
    h_eff = h0 - ANG * prop.w_frame_mhz * np.diag(n)
    np.testing.assert_allclose(prop.u, expm_hermitian(h_eff, 37.0), atol=1e-12)


def test_zero_amplitude_full_mode_block_projection():
    nuc = NuclearSpin(Species.C13, a_par_mhz=40.0, a_perp_mhz=15.0,
                      gamma_mhz_per_t=10.705)
    sys = SpinSystem(omega0_mhz=30.0, omega_perp_mhz=4.0, nuclei=(nuc,),
                     mode="full")
    h0 = build_hamiltonian(sys)
    pulse = ChirpPulse(w_start_mhz=2800.0, w_bdw_mhz=100.0, tau_p_ns=25.0,
                       rabi_mhz=0.0)
    prop = pulse_propagator(h0, pulse, tol=1e-9)
    _, n = drive_and_projector(6)
    mask = np.equal.outer(n, n)
    h_eff = np.where(mask, h0, 0.0) - ANG * prop.w_frame_mhz * np.diag(n)
    np.testing.assert_allclose(prop.u, expm_hermitian(h_eff, 25.0), atol=1e-8)


def test_propagator_unitary_and_converged():
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=50.0)
    h0 = build_hamiltonian(sys)
    pulse = ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=100.0, tau_p_ns=40.0,
                       rabi_mhz=8.0)
    prop = pulse_propagator(h0, pulse, tol=1e-8)
    assert prop.cauchy_error < 1e-8
    assert is_unitary(prop.u, tol=1e-10)
    # self-consistency: a finer initial step keeps the answer
    finer = pulse_propagator(h0, pulse, tol=1e-8, dt0=prop.dt_ns / 2)
    assert np.max(np.abs(prop.u - finer.u)) < 5e-8


def test_frame_choice_preserves_amplitudes():
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=50.0)
    h0 = build_hamiltonian(sys)
    pulse = ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=100.0, tau_p_ns=40.0,
                       rabi_mhz=8.0)
    a = pulse_propagator(h0, pulse, tol=1e-9)
    b = pulse_propagator(h0, pulse, frame=pulse.w_center_mhz + 37.0, tol=1e-9)
    np.testing.assert_allclose(np.abs(a.u), np.abs(b.u), atol=1e-7)


def test_phase_offset_is_frame_rotation():
    # shifting the waveform phase by beta conjugates U by exp(-i beta N)
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=50.0)
    h0 = build_hamiltonian(sys)
    beta = 0.83
    base = ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=100.0, tau_p_ns=40.0,
                      rabi_mhz=8.0)
    shifted = ChirpPulse(w_start_mhz=2770.0, w_bdw_mhz=100.0, tau_p_ns=40.0,
                         rabi_mhz=8.0, phase0_rad=beta)
    u0 = pulse_propagator(h0, base, tol=1e-9).u
    ub = pulse_propagator(h0, shifted, tol=1e-9).u
    _, n = drive_and_projector(3)
    rot = np.exp(-1j * beta * n)
    np.testing.assert_allclose(ub, rot[:, None] * u0 * rot.conj()[None, :],
                               atol=1e-7)


def test_two_level_calibration_hits_target():
    h2 = ANG * np.diag([60.0, 0.0]).astype(complex)
    pulse = ChirpPulse(w_start_mhz=-60.0, w_bdw_mhz=240.0, tau_p_ns=80.0,
                       rabi_mhz=1.0)
    res = calibrate_rabi(h2, pulse, 0.5)
    assert abs(res.transfer - 0.5) <= 1e-4
    check = passage_transfer(h2, ChirpPulse(w_start_mhz=-60.0, w_bdw_mhz=240.0,
                                            tau_p_ns=80.0, rabi_mhz=res.rabi_mhz),
                             (0, 1), tol=1e-8)
    assert abs(check - 0.5) <= 2e-4
    assert res.n_evals > 0


def test_lz_seed_closed_form():
    pulse = ChirpPulse(w_start_mhz=0.0, w_bdw_mhz=500.0, tau_p_ns=50.0,
                       rabi_mhz=1.0)
    k_ang = ANG * pulse.rate_mhz_per_ns
    for target in (0.25, 0.5, 0.9):
        seed = lz_seed_rabi_mhz(pulse, target)
        expect = math.sqrt(-2.0 * k_ang * math.log1p(-target)) / math.pi / ANG
        assert seed == pytest.approx(expect, rel=1e-12)
    assert lz_seed_rabi_mhz(pulse, 0.0) == 0.0
    # seed grows with target and with the sweep rate as sqrt(k)
    assert lz_seed_rabi_mhz(pulse, 0.9) > lz_seed_rabi_mhz(pulse, 0.5)
    quick = ChirpPulse(w_start_mhz=0.0, w_bdw_mhz=500.0, tau_p_ns=12.5,
                       rabi_mhz=1.0)
    assert lz_seed_rabi_mhz(quick, 0.5) == pytest.approx(
        2.0 * lz_seed_rabi_mhz(pulse, 0.5), rel=1e-12)


def test_calibration_rejects_and_degenerates():
    h2 = ANG * np.diag([60.0, 0.0]).astype(complex)
    pulse = ChirpPulse(w_start_mhz=-60.0, w_bdw_mhz=240.0, tau_p_ns=80.0,
                       rabi_mhz=1.0)
    with pytest.raises(CalibrationError):
        calibrate_rabi(h2, pulse, 1.0)
    with pytest.raises(CalibrationError):
        calibrate_rabi(h2, pulse, -0.1)
    res = calibrate_rabi(h2, pulse, 0.0)
    assert res.rabi_mhz == 0.0
    h3 = ANG * np.diag([2900.0, 0.0, 2800.0]).astype(complex)
    with pytest.raises(CalibrationError):
        calibrate_rabi(h3, pulse, 0.5)  # dim > 2 needs an explicit transition


def test_passage_unitary_first_state():
    theta, phi = 1.2, 0.6
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    u = passage_unitary(PassageParams(theta, phi), (0, 1), 3, "excitation")
    psi = u[:, 1]
    assert psi[1] == pytest.approx(np.exp(+0.5j * phi) * c, abs=1e-15)
    assert psi[0] == pytest.approx(-np.exp(-0.5j * phi) * s, abs=1e-15)
    assert psi[2] == 0.0
    assert is_unitary(u)


def test_passage_unitary_two_crossings():
    # sweeping both transitions leaves amplitudes
    #   lower: e^{i phi} cos^2, first upper: -e^{-i phi/2} sin, second: -sin cos
    theta, phi = math.pi / 2, 0.37
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    p = PassageParams(theta, phi)
    first = passage_unitary(p, (2, 1), 3, "excitation")
    second = passage_unitary(p, (0, 1), 3, "excitation")
    psi = (second @ first)[:, 1]
    assert psi[1] == pytest.approx(np.exp(1j * phi) * c * c, abs=1e-15)
    assert psi[2] == pytest.approx(-np.exp(-0.5j * phi) * s, abs=1e-15)
    assert psi[0] == pytest.approx(-s * c, abs=1e-15)
    pops = np.abs(psi) ** 2
    np.testing.assert_allclose(pops[[1, 2, 0]], [0.25, 0.5, 0.25], atol=1e-15)


def test_passage_unitary_readout_reverses_factors():
    p = PassageParams(0.9, -0.4)
    exc = passage_unitary(p, (0, 1), 2, "excitation")
    ro = passage_unitary(p, (0, 1), 2, "readout")
    # same y-rotation, z-phase applied on the other side: rz ro == exc rz
    zp = np.exp(-0.5j * p.phi_rad)
    rz = np.diag([zp, zp.conjugate()])
    np.testing.assert_allclose(rz @ ro, exc @ rz, atol=1e-15)


def test_passage_unitary_validation():
    p = PassageParams(0.5, 0.0)
    with pytest.raises(ValueError):
        passage_unitary(p, (1, 1), 3)
    with pytest.raises(ValueError):
        passage_unitary(p, (0, 3), 3)
    with pytest.raises(ValueError):
        passage_unitary(p, (0, 1), 3, kind="sideways")
    with pytest.raises(ValueError):
        PassageParams(-0.1, 0.0)
    with pytest.raises(ValueError):
        PassageParams(3.2, 0.0)


def test_fit_theta_matches_two_level_transfer():
    # on the two-level problem itself the fitted flip angle is exact
    gap = 40.0
    pulse = ChirpPulse(w_start_mhz=-80.0, w_bdw_mhz=240.0, tau_p_ns=60.0,
                       rabi_mhz=5.0)
    params = fit_passage_params(pulse, gap, coupling_scale=1.0, tol=1e-9)
    h2 = ANG * np.diag([gap, 0.0]).astype(complex)
    transfer = passage_transfer(h2, pulse, (0, 1), tol=1e-9)
    assert math.sin(params.theta_rad / 2) ** 2 == pytest.approx(transfer,
                                                                abs=1e-7)


def test_sequential_model_single_transition():
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=150.0)
    # window covers only the low transition at 2720
    pulse = ChirpPulse(w_start_mhz=2680.0, w_bdw_mhz=80.0, tau_p_ns=50.0,
                       rabi_mhz=4.0)
    hits = swept_transitions(sys, pulse)
    assert len(hits) == 1
    up, lo = hits[0].upper_lower_basis()
    params = PassageParams(1.0, 0.2)
    model = sequential_passage_model(sys, pulse, params=params)
    np.testing.assert_allclose(model, passage_unitary(params, (up, lo), 3),
                               atol=1e-15)


def test_sequential_model_warnings():
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=400.0)
    pulse = ChirpPulse(w_start_mhz=2800.0, w_bdw_mhz=50.0, tau_p_ns=50.0,
                       rabi_mhz=4.0)
    with pytest.warns(UserWarning, match="no transition"):
        u = sequential_passage_model(sys, pulse, params=PassageParams(1.0, 0.0))
    np.testing.assert_allclose(u, np.eye(3), atol=0)
    crowded = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=1.0)
    wide = ChirpPulse(w_start_mhz=2850.0, w_bdw_mhz=40.0, tau_p_ns=50.0,
                      rabi_mhz=10.0)
    with pytest.warns(UserWarning, match="sequential-passage model"):
        sequential_passage_model(crowded, wide, params=PassageParams(1.0, 0.0))


def test_sequential_model_rejects_full_mode():
    sys = SpinSystem(omega0_mhz=30.0, omega_perp_mhz=3.0, mode="full")
    pulse = ChirpPulse(w_start_mhz=2800.0, w_bdw_mhz=100.0, tau_p_ns=50.0,
                       rabi_mhz=4.0)
    with pytest.raises(ValueError):
        sequential_passage_model(sys, pulse, params=PassageParams(1.0, 0.0))


def test_embedded_transfer_uses_sqrt2_coupling():
    # an isolated S=1 transition behaves as the two-level problem driven at
    # sqrt(2) times the amplitude
    sys = SpinSystem(d_zfs_mhz=2870.0, omega0_mhz=300.0)
    h0 = build_hamiltonian(sys)
    pulse = ChirpPulse(w_start_mhz=2470.0, w_bdw_mhz=200.0, tau_p_ns=80.0,
                       rabi_mhz=5.0)
    hits = swept_transitions(sys, pulse)
    assert len(hits) == 1
    up, lo = hits[0].upper_lower_basis()
    full = passage_transfer(h0, pulse, (up, lo), tol=1e-8)
    h2 = ANG * np.diag([hits[0].freq_mhz, 0.0]).astype(complex)
    two = passage_transfer(h2, ChirpPulse(w_start_mhz=2470.0, w_bdw_mhz=200.0,
                                          tau_p_ns=80.0,
                                          rabi_mhz=S1_COUPLING_SCALE * 5.0),
                           (0, 1), tol=1e-8)
    assert full == pytest.approx(two, abs=5e-3)
